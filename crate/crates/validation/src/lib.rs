//! Holds the `acceptance` test target. It lives in its own workspace member
//! so that the other crates' tests still run when a criterion is red.
