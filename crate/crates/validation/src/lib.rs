//! Holds the `acceptance` test target; run it with
//! `cargo test -p banach-validation --test acceptance`.
