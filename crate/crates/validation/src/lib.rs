//! Holds the `acceptance` test target. Run it with
//! `cargo test -p avalanche-validation --test acceptance`.
