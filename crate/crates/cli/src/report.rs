//! JSON report envelope and witness encoding.

use lovx_core::{SetArg, SetPair};
use serde::Serialize;
use serde_json::{json, Map, Value};

/// Version tag of the report layout.
pub const SCHEMA: &str = "lovx-report/1";

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Witness {
    Set(Vec<usize>),
    Pair { pos: Vec<usize>, neg: Vec<usize> },
    Tuple(Vec<Vec<usize>>),
    PairTuple(Vec<Witness>),
}

fn pair(p: &SetPair) -> Witness {
    Witness::Pair {
        pos: p.pos.elems(),
        neg: p.neg.elems(),
    }
}

impl From<&SetArg> for Witness {
    fn from(a: &SetArg) -> Self {
        match a {
            SetArg::Set(s) => Witness::Set(s.elems()),
            SetArg::Pair(p) => pair(p),
            SetArg::Tuple(t) => Witness::Tuple(t.iter().map(|s| s.elems()).collect()),
            SetArg::PairTuple(t) => Witness::PairTuple(t.iter().map(pair).collect()),
        }
    }
}

pub fn witness(a: &SetArg) -> Value {
    serde_json::to_value(Witness::from(a)).expect("witness encodes")
}

/// Report under construction; keys serialize in sorted order.
#[derive(Debug)]
pub struct Report {
    pub command: &'static str,
    pub seed: u64,
    pub body: Map<String, Value>,
    /// Scalar summary for TSV output.
    pub scalars: Vec<(String, String)>,
    pub wall_ms: f64,
}

impl Report {
    pub fn new(command: &'static str, seed: u64) -> Self {
        Self {
            command,
            seed,
            body: Map::new(),
            scalars: Vec::new(),
            wall_ms: 0.0,
        }
    }

    pub fn set(&mut self, key: &str, value: impl Serialize) {
        let mut v = serde_json::to_value(value).expect("report value encodes");
        clear_negative_zero(&mut v);
        self.body.insert(key.into(), v);
    }

    pub fn scalar(&mut self, key: &str, value: impl ToString) {
        let text = value.to_string();
        let text = if text == "-0" { "0".into() } else { text };
        self.scalars.push((key.into(), text));
    }

    pub fn to_json(&self) -> String {
        let mut v = Map::new();
        v.insert("schema".into(), json!(SCHEMA));
        v.insert("command".into(), json!(self.command));
        v.insert("seed".into(), json!(self.seed));
        v.insert("timing".into(), json!({ "wall_ms": self.wall_ms }));
        for (k, val) in &self.body {
            v.insert(k.clone(), val.clone());
        }
        serde_json::to_string_pretty(&Value::Object(v)).expect("report encodes")
    }

    pub fn to_tsv(&self) -> String {
        let mut keys = vec!["command".to_string(), "seed".to_string()];
        let mut vals = vec![self.command.to_string(), self.seed.to_string()];
        for (k, v) in &self.scalars {
            keys.push(k.clone());
            vals.push(v.clone());
        }
        format!("{}\n{}\n", keys.join("\t"), vals.join("\t"))
    }
}

fn clear_negative_zero(v: &mut Value) {
    match v {
        Value::Number(x) if x.as_f64() == Some(0.0) && x.as_f64().is_some_and(f64::is_sign_negative) => {
            *v = json!(0.0);
        }
        Value::Array(a) => a.iter_mut().for_each(clear_negative_zero),
        Value::Object(m) => m.values_mut().for_each(clear_negative_zero),
        _ => {}
    }
}

/// Drop the timing field so reports from repeated runs compare byte for byte.
pub fn without_timing(json_text: &str) -> String {
    let mut v: Value = serde_json::from_str(json_text).expect("report is JSON");
    if let Value::Object(m) = &mut v {
        m.remove("timing");
    }
    serde_json::to_string(&v).expect("report encodes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use lovx_core::SubsetId;

    #[test]
    fn witnesses_are_sorted_lists() {
        let a = SetArg::Set(SubsetId::from_elems(&[2, 0]));
        assert_eq!(witness(&a), json!([0, 2]));
        let p = SetArg::Pair(SetPair::new(SubsetId(1), SubsetId(4)).unwrap());
        assert_eq!(witness(&p), json!({"pos": [0], "neg": [2]}));
    }

    #[test]
    fn negative_zero_prints_as_zero() {
        let mut r = Report::new("eigen", 0);
        r.set("values", [-0.0, 1.0]);
        r.scalar("value", -0.0);
        assert!(!r.to_json().contains("-0"));
        assert!(r.to_tsv().ends_with("\t0\n"));
    }

    #[test]
    fn envelope_carries_schema_and_seed() {
        let mut r = Report::new("oracle", 9);
        r.set("value", 2.0);
        r.scalar("value", 2);
        let text = r.to_json();
        let v: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["schema"], SCHEMA);
        assert_eq!(v["seed"], 9);
        assert!(!without_timing(&text).contains("wall_ms"));
        assert_eq!(r.to_tsv(), "command\tseed\tvalue\noracle\t9\t2\n");
    }
}
