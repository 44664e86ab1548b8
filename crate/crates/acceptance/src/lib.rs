//! Hosts the `acceptance` test target of `zerodetect`.
