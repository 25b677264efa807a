use serde::Serialize;
use serde_json::Value;
use std::fmt::Write as _;

/// Process exit status; `combine` keeps the most severe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExitStatus {
    Certified,
    Negative,
    Error,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        match self {
            ExitStatus::Certified => 0,
            ExitStatus::Error => 1,
            ExitStatus::Negative => 2,
        }
    }

    pub fn from_verdict(ok: bool) -> Self {
        if ok {
            ExitStatus::Certified
        } else {
            ExitStatus::Negative
        }
    }

    pub fn combine(self, other: ExitStatus) -> ExitStatus {
        self.max(other)
    }
}

/// One report line: a record kind and ordered fields.
#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub kind: String,
    pub fields: Vec<(String, Value)>,
}

impl Record {
    pub fn new(kind: &str) -> Self {
        Record { kind: kind.to_string(), fields: Vec::new() }
    }

    pub fn with(mut self, key: &str, value: impl Serialize) -> Self {
        self.fields.push((key.to_string(), serde_json::to_value(value).unwrap_or(Value::Null)));
        self
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.fields.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub records: Vec<Record>,
    pub status: ExitStatus,
}

impl Report {
    pub fn new() -> Self {
        Report { records: Vec::new(), status: ExitStatus::Certified }
    }

    pub fn push(&mut self, record: Record) {
        self.records.push(record);
    }

    pub fn settle(&mut self, status: ExitStatus) {
        self.status = self.status.combine(status);
    }

    pub fn find(&self, kind: &str) -> Option<&Record> {
        self.records.iter().find(|r| r.kind == kind)
    }

    /// One JSON object per line, `record` first.
    pub fn to_structured(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            let mut map = serde_json::Map::new();
            map.insert("record".into(), Value::String(r.kind.clone()));
            for (k, v) in &r.fields {
                map.insert(k.clone(), v.clone());
            }
            let _ = writeln!(out, "{}", Value::Object(map));
        }
        let _ = writeln!(out, "{}", serde_json::json!({ "record": "exit", "status": self.status, "code": self.status.code() }));
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            let _ = writeln!(out, "[{}]", r.kind);
            let width = r.fields.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
            for (k, v) in &r.fields {
                let shown = match v {
                    Value::String(s) => s.clone(),
                    other => other.to_string(),
                };
                let _ = writeln!(out, "  {k:<width$}  {shown}");
            }
        }
        let _ = writeln!(out, "exit {} ({:?})", self.status.code(), self.status);
        out
    }
}

impl Default for Report {
    fn default() -> Self {
        Report::new()
    }
}
