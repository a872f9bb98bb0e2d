use std::fmt::Write as _;

use serde_json::{json, Map, Value};

use charp_core::arith::PPowRational;
use charp_core::bsato::BSFactorization;
use charp_core::report::Report;

use crate::Format;

pub struct Output {
    pub prime: u64,
    pub vars: Vec<String>,
    pub poly: Option<String>,
    pub level: Option<u32>,
    pub body: Body,
}

pub enum Body {
    TestIdeal {
        lambda: String,
        ideal: Vec<String>,
        level: u32,
        stabilized: bool,
    },
    Jumps(Vec<(PPowRational, PPowRational)>),
    /// Digit arrays `[i_1, .., i_e]`, largest root first.
    Gamma {
        tuples: Vec<Vec<u64>>,
        aux: Option<String>,
    },
    Bsato(Vec<BSFactorization>),
    Nu {
        ideal: Vec<String>,
        nu: u64,
        ratio: PPowRational,
    },
    Report(Report),
}

pub fn render(out: &Output, format: Format, decimal: bool) -> Result<String, String> {
    match format {
        Format::Json => {
            let v = to_json(out, decimal);
            serde_json::to_string_pretty(&v).map(|s| s + "\n").map_err(|e| e.to_string())
        }
        Format::Text => Ok(to_text(out, decimal)),
        Format::Csv => to_csv(out, decimal),
    }
}

fn root_json(r: &PPowRational, decimal: bool) -> Value {
    let mut m = Map::new();
    m.insert("num".into(), json!(r.numer().to_string()));
    m.insert("den_exp".into(), json!(r.den_exp()));
    if decimal {
        m.insert("decimal".into(), json!(r.to_f64()));
    }
    Value::Object(m)
}

fn roots_desc(b: &BSFactorization) -> Vec<&PPowRational> {
    b.roots.iter().rev().collect()
}

pub fn to_json(out: &Output, decimal: bool) -> Value {
    let mut m = Map::new();
    m.insert("prime".into(), json!(out.prime));
    m.insert("vars".into(), json!(out.vars));
    if let Some(p) = &out.poly {
        m.insert("poly".into(), json!(p));
    }
    if let Some(l) = out.level {
        m.insert("level".into(), json!(l));
    }
    match &out.body {
        Body::TestIdeal { lambda, ideal, level, stabilized } => {
            m.insert("lambda".into(), json!(lambda));
            m.insert("ideal".into(), json!(ideal));
            m.insert("stable_level".into(), json!(level));
            m.insert("stabilized".into(), json!(stabilized));
        }
        Body::Jumps(jumps) => {
            let list: Vec<Value> = jumps
                .iter()
                .map(|(lo, hi)| {
                    let mut j = Map::new();
                    j.insert("lo".into(), json!(lo.to_string()));
                    j.insert("hi".into(), json!(hi.to_string()));
                    if decimal {
                        j.insert("lo_decimal".into(), json!(lo.to_f64()));
                        j.insert("hi_decimal".into(), json!(hi.to_f64()));
                    }
                    Value::Object(j)
                })
                .collect();
            m.insert("jumps".into(), Value::Array(list));
        }
        Body::Gamma { tuples, aux } => {
            m.insert("gamma".into(), json!(tuples));
            if let Some(h) = aux {
                m.insert("aux".into(), json!(h));
            }
        }
        Body::Bsato(levels) => {
            if let Some(top) = levels.last() {
                let roots: Vec<Value> = roots_desc(top).into_iter().map(|r| root_json(r, decimal)).collect();
                m.insert("roots".into(), Value::Array(roots));
            }
            let all: Vec<Value> = levels
                .iter()
                .map(|b| {
                    let mut l = Map::new();
                    l.insert("level".into(), json!(b.level));
                    let roots: Vec<Value> = roots_desc(b).into_iter().map(|r| root_json(r, decimal)).collect();
                    l.insert("roots".into(), Value::Array(roots));
                    if let Some(cp) = &b.char_p_roots {
                        let vals: Vec<u64> = cp.iter().map(|s| s.value()).collect();
                        l.insert("char_p_roots".into(), json!(vals));
                    }
                    Value::Object(l)
                })
                .collect();
            m.insert("levels".into(), Value::Array(all));
        }
        Body::Nu { ideal, nu, ratio } => {
            m.insert("ideal".into(), json!(ideal));
            m.insert("nu".into(), json!(nu));
            m.insert("ratio".into(), json!(ratio.to_string()));
            if decimal {
                m.insert("ratio_decimal".into(), json!(ratio.to_f64()));
            }
        }
        Body::Report(r) => {
            m.insert(
                "report".into(),
                json!({
                    "name": r.name,
                    "pass": r.pass,
                    "checks": r.checked,
                    "witnesses": r.witnesses,
                }),
            );
        }
    }
    Value::Object(m)
}

fn with_decimal(r: &PPowRational, decimal: bool) -> String {
    if decimal {
        format!("{r} (≈ {:.6})", r.to_f64())
    } else {
        r.to_string()
    }
}

fn tuple_text(t: &[u64]) -> String {
    let parts: Vec<String> = t.iter().map(|d| d.to_string()).collect();
    format!("({})", parts.join(","))
}

fn to_text(out: &Output, decimal: bool) -> String {
    let mut s = String::new();
    let level = out.level.unwrap_or(1);
    match &out.body {
        Body::TestIdeal { lambda, ideal, level, stabilized } => {
            let _ = writeln!(s, "τ(f^{lambda}) = ({})", ideal.join(", "));
            if *stabilized {
                let _ = writeln!(s, "stable from level {level}");
            } else {
                let _ = writeln!(s, "not stable by level {level}");
            }
        }
        Body::Jumps(jumps) => {
            for (lo, hi) in jumps {
                let _ = writeln!(s, "({}, {}]", with_decimal(lo, decimal), with_decimal(hi, decimal));
            }
        }
        Body::Gamma { tuples, aux } => {
            let parts: Vec<String> = tuples.iter().map(|t| tuple_text(t)).collect();
            let name = match aux {
                Some(h) => format!("Γ_(f,{h})^{level}"),
                None => format!("Γ^{level}"),
            };
            let _ = writeln!(s, "{name} = {{{}}}", parts.join(", "));
        }
        Body::Bsato(levels) => {
            for b in levels {
                let roots: Vec<String> = roots_desc(b).into_iter().map(|r| with_decimal(r, decimal)).collect();
                let _ = writeln!(s, "level {}: {}", b.level, roots.join(", "));
                if let Some(cp) = &b.char_p_roots {
                    let vals: Vec<String> = cp.iter().map(|v| v.to_string()).collect();
                    let _ = writeln!(s, "digits in F_{}: {}", out.prime, vals.join(", "));
                }
            }
        }
        Body::Nu { ideal, nu, ratio } => {
            let _ = writeln!(s, "J = ({})", ideal.join(", "));
            let _ = writeln!(s, "ν = {nu}");
            let _ = writeln!(s, "ν/p^{level} = {}", with_decimal(ratio, decimal));
        }
        Body::Report(r) => {
            let _ = writeln!(s, "{r}");
        }
    }
    s
}

fn to_csv(out: &Output, decimal: bool) -> Result<String, String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| e.to_string();
    match &out.body {
        Body::TestIdeal { ideal, .. } => {
            w.write_record(["generator"]).map_err(err)?;
            for g in ideal {
                w.write_record([g]).map_err(err)?;
            }
        }
        Body::Jumps(jumps) => {
            let mut head = vec!["lo", "hi"];
            if decimal {
                head.extend(["lo_decimal", "hi_decimal"]);
            }
            w.write_record(&head).map_err(err)?;
            for (lo, hi) in jumps {
                let mut row = vec![lo.to_string(), hi.to_string()];
                if decimal {
                    row.extend([lo.to_f64().to_string(), hi.to_f64().to_string()]);
                }
                w.write_record(&row).map_err(err)?;
            }
        }
        Body::Gamma { tuples, .. } => {
            let e = tuples.first().map_or(out.level.unwrap_or(1) as usize, |t| t.len());
            let head: Vec<String> = (1..=e).map(|l| format!("i{l}")).collect();
            w.write_record(&head).map_err(err)?;
            for t in tuples {
                w.write_record(t.iter().map(|d| d.to_string())).map_err(err)?;
            }
        }
        Body::Bsato(levels) => {
            let mut head = vec!["level", "num", "den_exp", "root"];
            if decimal {
                head.push("decimal");
            }
            w.write_record(&head).map_err(err)?;
            for b in levels {
                for r in roots_desc(b) {
                    let mut row = vec![
                        b.level.to_string(),
                        r.numer().to_string(),
                        r.den_exp().to_string(),
                        r.to_string(),
                    ];
                    if decimal {
                        row.push(r.to_f64().to_string());
                    }
                    w.write_record(&row).map_err(err)?;
                }
            }
        }
        Body::Nu { nu, ratio, .. } => {
            w.write_record(["nu", "ratio"]).map_err(err)?;
            w.write_record([nu.to_string(), ratio.to_string()]).map_err(err)?;
        }
        Body::Report(r) => {
            w.write_record(["name", "pass", "checks", "witness"]).map_err(err)?;
            if r.witnesses.is_empty() {
                w.write_record([r.name.clone(), r.pass.to_string(), r.checked.to_string(), String::new()])
                    .map_err(err)?;
            }
            for wit in &r.witnesses {
                w.write_record([r.name.clone(), r.pass.to_string(), r.checked.to_string(), wit.clone()])
                    .map_err(err)?;
            }
        }
    }
    let bytes = w.into_inner().map_err(|e| e.to_string())?;
    String::from_utf8(bytes).map_err(|e| e.to_string())
}
