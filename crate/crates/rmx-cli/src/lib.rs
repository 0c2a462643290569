//! Library side of the `rmx` command-line tool: the JSON document format
//! used by `rmx eval`.

pub mod document;
