#![allow(dead_code)]

use serde_json::Value;

pub struct Oracles(Value);

pub fn oracles() -> Oracles {
    let raw = include_str!("../fixtures/oracles.json");
    Oracles(serde_json::from_str(raw).expect("oracles.json parses"))
}

fn num(v: &Value) -> f64 {
    match v {
        Value::String(s) => s.parse().expect("numeric string"),
        Value::Number(n) => n.as_f64().unwrap(),
        other => panic!("not a number: {other}"),
    }
}

impl Oracles {
    pub fn scalar(&self, key: &str) -> f64 {
        num(&self.0[key])
    }

    /// (x, value) pairs of a one-argument table.
    pub fn table(&self, key: &str) -> Vec<(f64, f64)> {
        self.0[key]
            .as_array()
            .unwrap()
            .iter()
            .map(|e| (num(&e["x"]), num(&e["value"])))
            .collect()
    }

    /// (p, s, order, value) rows for gamma_p and its derivatives.
    pub fn gamma_p(&self) -> Vec<(f64, f64, u8, f64)> {
        self.0["gamma_p"]
            .as_array()
            .unwrap()
            .iter()
            .map(|e| (num(&e["p"]), num(&e["s"]), num(&e["order"]) as u8, num(&e["value"])))
            .collect()
    }

    pub fn gamma_p_at(&self, p: f64, s: f64, order: u8) -> f64 {
        self.gamma_p()
            .into_iter()
            .find(|r| r.0 == p && r.1 == s && r.2 == order)
            .map(|r| r.3)
            .unwrap_or_else(|| panic!("no oracle for p = {p}, s = {s}, order = {order}"))
    }
}

pub fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}
