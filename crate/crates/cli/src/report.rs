use std::io::Write;

use qteleport_core::protocols::{PrepReport, TeleportMode, TeleportReport};
use qteleport_core::{Histogram, NoiseModel};
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: &str = "1.0";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutputReport {
    pub schema_version: String,
    pub command: String,
    pub config: ConfigEcho,
    pub results: Results,
    pub timing_ms: f64,
}

/// The effective settings a report was produced with. Worker count is
/// deliberately absent: it never changes the numbers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub shots: u64,
    pub seed: u64,
    pub analytic: bool,
    pub noise: Option<NoiseModel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<TeleportMode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub protocol: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub circuit: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Results {
    Histogram(Histogram),
    Analytic(AnalyticOutcomes),
    Prep(PrepReport),
    Teleport(TeleportReport),
}

/// Exact outcome probabilities over the classical register, in index order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalyticOutcomes {
    pub n_bits: usize,
    pub outcomes: Vec<String>,
    pub probabilities: Vec<f64>,
}

impl OutputReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Writes the flat table behind a histogram or analytic result.
/// Returns `None` for nested reports, which have no CSV form.
pub fn write_csv<W: Write>(results: &Results, out: W) -> Option<csv::Result<()>> {
    let mut w = csv::Writer::from_writer(out);
    let res = match results {
        Results::Histogram(h) => (|| {
            w.write_record(["bitstring", "count", "frequency"])?;
            for (bits, count) in &h.counts {
                w.write_record([
                    bits.clone(),
                    count.to_string(),
                    h.frequency(bits).to_string(),
                ])?;
            }
            w.flush()?;
            Ok(())
        })(),
        Results::Analytic(a) => (|| {
            w.write_record(["bitstring", "probability"])?;
            for (bits, p) in a.outcomes.iter().zip(&a.probabilities) {
                w.write_record([bits.clone(), p.to_string()])?;
            }
            w.flush()?;
            Ok(())
        })(),
        Results::Prep(_) | Results::Teleport(_) => return None,
    };
    Some(res)
}
