//! Library half of the command-line front end: the expression parser, the
//! JSON document types, and the self-test battery. The `voa` binary is a
//! thin dispatcher over these.

pub mod json;
pub mod parse;
pub mod selftest;
