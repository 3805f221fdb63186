use proctensor::divisibility::IcpVerdict;
use proctensor::ClassificationReport;

pub fn icp_text(v: IcpVerdict) -> &'static str {
    match v {
        IcpVerdict::Yes => "yes",
        IcpVerdict::Partial => "partial",
        IcpVerdict::No => "no",
        IcpVerdict::Inapplicable => "inapplicable",
    }
}

fn times_text(times: &[f64]) -> String {
    if times.len() <= 6 {
        let parts: Vec<String> = times.iter().map(|t| format!("{t}")).collect();
        format!("{{{}}}", parts.join(", "))
    } else {
        format!("{} points on [{}, {}]", times.len(), times[0], times[times.len() - 1])
    }
}

pub fn report_table(r: &ClassificationReport) -> String {
    let mut out = String::new();
    out.push_str(&format!("scenario  {} ({})\n", r.scenario, &r.scenario_hash[..12]));
    out.push_str(&format!("times     {}\n", times_text(&r.times)));
    out.push_str(&format!("tolerance verdict {:e}, violation {:e}\n\n", r.tolerances.verdict, r.tolerances.violation));
    out.push_str(&format!("{:<16} {:<14} {}\n", "test", "verdict", "worst residual"));
    let min_eig = r
        .icp
        .min_eigenvalue
        .map_or("n/a".to_string(), |e| format!("min λ {e:.3e}"));
    out.push_str(&format!("{:<16} {:<14} {}\n", "iCP", icp_text(r.icp.global), min_eig));
    for (name, c) in [("non-signalling", &r.nonsignalling), ("oCP", &r.ocp), ("Markov", &r.markov)] {
        out.push_str(&format!("{:<16} {:<14} {:.3e}\n", name, c.verdict, c.residual));
    }
    let inapplicable = r
        .icp
        .pairs
        .iter()
        .filter(|p| p.status == proctensor::divisibility::PairStatus::Inapplicable)
        .count();
    if inapplicable > 0 {
        out.push_str(&format!("\n{inapplicable} of {} iCP pairs inapplicable (singular Λ_s:0)\n", r.icp.pairs.len()));
    }
    for v in &r.hierarchy_violations {
        out.push_str(&format!("warning: {v}\n"));
    }
    out.push_str(&format!("\nlabel     {}\n", r.label_text()));
    out
}
