//! Line-delimited `key=value` records, one per pipeline step.

use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceRecord {
    pub stage: String,
    pub fields: Vec<(String, String)>,
}

impl TraceRecord {
    pub fn get(&self, key: &str) -> Option<&str> {
        self.fields
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }
}

impl fmt::Display for TraceRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "stage={}", self.stage)?;
        for (k, v) in &self.fields {
            write!(f, " {k}={v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Trace {
    pub records: Vec<TraceRecord>,
}

impl Trace {
    pub fn record(&mut self, stage: &str, fields: &[(&str, String)]) {
        self.records.push(TraceRecord {
            stage: stage.to_string(),
            fields: fields
                .iter()
                .map(|(k, v)| (k.to_string(), v.clone()))
                .collect(),
        });
    }

    pub fn stages(&self) -> impl Iterator<Item = &str> {
        self.records.iter().map(|r| r.stage.as_str())
    }

    pub fn extend(&mut self, other: Trace) {
        self.records.extend(other.records);
    }
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.records {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_key_value_lines() {
        let mut t = Trace::default();
        t.record("base", &[("n", "5".into()), ("size", "3".into())]);
        t.record("color", &[]);
        assert_eq!(t.to_string(), "stage=base n=5 size=3\nstage=color\n");
        assert_eq!(t.records[0].get("size"), Some("3"));
    }
}
