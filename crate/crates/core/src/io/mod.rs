//! Text formats: net files, condition files, JSON reports and DOT graphs.

pub mod condition;
pub mod dot;
pub mod netfile;
pub mod report;

pub use condition::{format_condition, parse_condition, parse_conditions, ConditionParseError};
pub use dot::to_dot;
pub use netfile::{parse_net, parse_powered_support, serialize_net, NetFileError};
pub use report::{build_report, to_json, Report};
