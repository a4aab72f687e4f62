//! File formats, monitoring windows, simulation runners and the `perfest`
//! command line on top of [`perfest_core`].

pub mod experiments;
pub mod input;
pub mod output;
pub mod report;

pub use input::{parse_input, parse_reader, Format, InputError, ParsedInput};
pub use report::{render_json, windowed_estimates, ConfigEcho, MonitoringReport};
