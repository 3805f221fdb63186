use proctensor::{builtin, classify, default_grid, ClassificationReport, Label, Tolerances};

use crate::render::{icp_text, report_table};
use crate::Failure;

pub struct Outcome {
    pub text: String,
    pub matches: bool,
}

enum Key {
    Icp,
    Ocp,
    Nonsignalling,
    Markov,
}

impl Key {
    fn name(&self) -> &'static str {
        match self {
            Key::Icp => "iCP",
            Key::Ocp => "oCP",
            Key::Nonsignalling => "non-signalling",
            Key::Markov => "Markov",
        }
    }

    fn value(&self, r: &ClassificationReport) -> &'static str {
        match self {
            Key::Icp => icp_text(r.icp.global),
            Key::Ocp => r.ocp.verdict.as_str(),
            Key::Nonsignalling => r.nonsignalling.verdict.as_str(),
            Key::Markov => r.markov.verdict.as_str(),
        }
    }
}

fn line(keys: &[(Key, &str)], pick: impl Fn(&Key, &str) -> String) -> String {
    keys.iter()
        .map(|(k, v)| format!("{}: {}", k.name(), pick(k, v)))
        .collect::<Vec<_>>()
        .join(", ")
}

pub fn run(name: &str) -> Result<Outcome, Failure> {
    let (spec, keys, label) = match name {
        "appC" => (
            "builtin:appC",
            vec![(Key::Icp, "yes"), (Key::Ocp, "no"), (Key::Nonsignalling, "no"), (Key::Markov, "no")],
            Label::IcpNotOcp,
        ),
        "appB" => (
            "builtin:appB",
            vec![(Key::Nonsignalling, "yes"), (Key::Ocp, "no")],
            Label::CondNonsignallingOnly,
        ),
        "fig2a" => (
            "builtin:fig2a-bell",
            vec![(Key::Ocp, "yes"), (Key::Markov, "no")],
            Label::OcpNonmarkovian,
        ),
        other => return Err(Failure::Input(format!("unknown demo `{other}`"))),
    };
    let scn = builtin(spec)?;
    let report = classify(&scn, &default_grid(&scn, proctensor::DEFAULT_GRID_POINTS)?, &Tolerances::default())?;
    let expected = line(&keys, |_, v| v.to_string());
    let computed = line(&keys, |k, _| k.value(&report).to_string());
    let matches = expected == computed && report.label == label;
    let mut text = report_table(&report);
    text.push_str(&format!("\nexpected  {expected}\ncomputed  {computed}\n"));
    text.push_str(&format!("expected label {label}, computed {}\n", report.label_text()));
    text.push_str(if matches { "match\n" } else { "MISMATCH\n" });
    Ok(Outcome { text, matches })
}
