//! Flat `key=value` run manifest, one entry per line, keys sorted.

use std::collections::BTreeMap;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RunManifest {
    entries: BTreeMap<String, String>,
}

impl RunManifest {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, key: impl Into<String>, value: impl ToString) {
        self.entries.insert(key.into(), value.to_string());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn entries(&self) -> &BTreeMap<String, String> {
        &self.entries
    }

    /// Output files recorded under `output.*`, in key order.
    pub fn outputs(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries
            .range("output.".to_string().."output/".to_string())
            .map(|(k, v)| (&k["output.".len()..], v.as_str()))
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            out.push_str(k);
            out.push('=');
            out.push_str(v);
            out.push('\n');
        }
        out
    }

    /// Parses manifest text; blank lines are skipped, the first `=` splits.
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut entries = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected key=value", i + 1))?;
            entries.insert(k.to_string(), v.to_string());
        }
        Ok(Self { entries })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sorted_text_round_trip() {
        let mut m = RunManifest::new();
        m.set("status", "ok");
        m.set("config.block", "2x2");
        m.set("output.labels", "a_labels.pgm");
        m.set("output.cluster1", "a_cluster1.pgm");
        m.set("path", "dir/with=equals.pgm");
        let text = m.to_text();
        assert_eq!(
            text,
            "config.block=2x2\noutput.cluster1=a_cluster1.pgm\noutput.labels=a_labels.pgm\npath=dir/with=equals.pgm\nstatus=ok\n"
        );
        assert_eq!(RunManifest::parse(&text).unwrap(), m);
        let outs: Vec<_> = m.outputs().collect();
        assert_eq!(outs, vec![("cluster1", "a_cluster1.pgm"), ("labels", "a_labels.pgm")]);
        assert!(RunManifest::parse("novalue\n").is_err());
    }
}
