//! Plain-text views of the JSON reports. Indices are 1-based here.

use std::fmt::Write;

use serde_json::Value;

fn num(v: &Value) -> String {
    match v.as_f64() {
        Some(x) => format!("{x}"),
        None => "-".into(),
    }
}

/// Residuals and tolerances span many decades.
fn sci(v: &Value) -> String {
    match v.as_f64() {
        Some(x) => format!("{x:e}"),
        None => "-".into(),
    }
}

fn nums(v: &Value) -> String {
    let items: Vec<String> = v.as_array().map(|a| a.iter().map(num).collect()).unwrap_or_default();
    format!("[{}]", items.join(", "))
}

fn partition(v: &Value) -> String {
    let parts: Vec<String> = v
        .as_array()
        .into_iter()
        .flatten()
        .map(|part| {
            part.as_array()
                .into_iter()
                .flatten()
                .filter_map(Value::as_u64)
                .map(|i| (i + 1).to_string())
                .collect::<String>()
        })
        .collect();
    parts.join("|")
}

fn natred(v: &Value) -> String {
    match v["case"].as_str() {
        Some("CaseA") => format!("case A, beta = {}", nums(&v["beta"])),
        Some("CaseB") => format!(
            "case B, ideal k = {}, beta = {}",
            v["k"].as_u64().map_or(0, |k| k + 1),
            nums(&v["beta"])
        ),
        Some("CaseC") => format!("case C, alpha = {}, S = {}", nums(&v["alpha"]), num(&v["s"])),
        _ => "not naturally reductive".into(),
    }
}

fn oracle(v: &Value) -> String {
    if v.is_null() {
        return "-".into();
    }
    format!(
        "{} ({} samples, max residual {}, tol {})",
        v["status"].as_str().unwrap_or("?"),
        v["samples"],
        sci(&v["max_residual"]),
        sci(&v["tol"])
    )
}

pub fn classify(r: &Value) -> String {
    let mut s = String::new();
    let go = &r["go"];
    let _ = writeln!(s, "m: {}", r["m"]);
    let _ = writeln!(s, "naturally reductive: {}", natred(&r["natred"]));
    let _ = writeln!(s, "normal: {}", r["normal"]);
    let _ = writeln!(s, "geodesic orbit: {} ({})", go["is_go"], go["verdict"].as_str().unwrap_or("?"));
    if let Some(reason) = go["reason"].as_str() {
        let _ = writeln!(s, "  reason: {reason}");
    }
    let cert = &go["certificate"];
    if !cert.is_null() {
        let _ = writeln!(s, "  gammas: {}", nums(&cert["gammas"]));
        let _ = writeln!(s, "  C: {}", nums(&cert["c"]));
    }
    if !go["oracle"].is_null() {
        let _ = writeln!(s, "  oracle: {}", oracle(&go["oracle"]));
    }
    let _ = writeln!(s, "agreement: {}", r["agreement"]);
    s
}

pub fn decompose(r: &Value) -> String {
    let mut s = String::new();
    let factors = r["factors"].as_array().cloned().unwrap_or_default();
    let _ = writeln!(s, "m: {}", r["m"]);
    let _ = writeln!(s, "factors: {}", factors.len());
    for f in &factors {
        let _ = writeln!(s, "  m = {}  labels {}  {}", f["m"], partition(&f["labels"]), natred(&f["natred"]));
        for row in f["T"].as_array().into_iter().flatten() {
            let _ = writeln!(s, "    {}", nums(row));
        }
    }
    let _ = writeln!(s, "isometry group: U(1)^{}", r["isometry_group_k"]);
    let _ = writeln!(s, "GO manifold: {}", r["go_manifold"]);
    for sp in r["splits"].as_array().into_iter().flatten() {
        let _ = writeln!(
            s,
            "split of {}: {} / {}",
            partition(&sp["labels"]),
            partition(&sp["p1"]),
            partition(&sp["p2"])
        );
    }
    s
}

pub fn verify(r: &Value) -> String {
    let mut s = String::new();
    let c = &r["classifier"];
    let _ = writeln!(s, "m: {}", r["m"]);
    let _ = writeln!(s, "classifier: natred {}, go {}", natred(&c["natred"]), c["go"].as_str().unwrap_or("?"));
    let _ = writeln!(s, "oracle: {}", oracle(&r["go_oracle"]));
    let _ = writeln!(s, "explicit Z_0: {}", oracle(&r["explicit"]));
    let cert = &r["certificate"];
    if cert.is_null() {
        let _ = writeln!(s, "certificate: -");
    } else {
        let _ = writeln!(
            s,
            "certificate ({}): {}: {}",
            cert["source"].as_str().unwrap_or("?"),
            natred(&cert["claimed"]),
            oracle(&cert["report"])
        );
    }
    let b = &r["brackets"];
    if !b.is_null() {
        let _ = writeln!(s, "brackets alpha/beta: {}", oracle(&b["alpha_beta"]));
        let _ = writeln!(s, "brackets in m_alpha: {}", oracle(&b["two_in_one"]));
    }
    for p in r["problems"].as_array().into_iter().flatten() {
        let _ = writeln!(s, "problem: {}", p.as_str().unwrap_or("?"));
    }
    let _ = writeln!(s, "agree: {}", r["agree"]);
    s
}

pub fn generate(r: &Value) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "z: {}  rho: {}  lambda: {}", nums(&r["z"]), num(&r["rho"]), num(&r["lambda"]));
    let _ = writeln!(s, "roots: {}", nums(&r["roots"]));
    let _ = writeln!(s, "gammas: {}", nums(&r["gammas"]));
    let _ = writeln!(s, "C: {}", nums(&r["c"]));
    s
}

pub fn trees(r: &Value) -> String {
    let mut s = String::new();
    for p in r["pairs"].as_array().into_iter().flatten() {
        let _ = writeln!(s, "{} / {}", partition(&p["p1"]), partition(&p["p2"]));
    }
    let _ = writeln!(s, "count: {}", r["count"]);
    s
}
