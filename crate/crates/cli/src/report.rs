use std::fmt::Write as _;

/// Ordered `key=value` records.
#[derive(Debug, Default)]
pub struct Report {
    entries: Vec<(String, String)>,
}

impl Report {
    pub fn text(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.entries.push((key.to_string(), value.to_string()));
        self
    }

    pub fn num(&mut self, key: &str, value: f64) -> &mut Self {
        self.text(key, sci(value))
    }

    pub fn list(&mut self, key: &str, values: &[f64]) -> &mut Self {
        let parts: Vec<String> = values.iter().map(|v| sci(*v)).collect();
        self.text(key, parts.join(","))
    }

    pub fn opt(&mut self, key: &str, value: Option<f64>) -> &mut Self {
        match value {
            Some(v) => self.num(key, v),
            None => self.text(key, "none"),
        }
    }

    pub fn status(&mut self, pass: bool) -> &mut Self {
        self.text("status", if pass { "pass" } else { "fail" })
    }

    pub fn render(&self, csv: bool) -> String {
        let mut out = String::new();
        if csv {
            out.push_str("key,value\n");
        }
        for (k, v) in &self.entries {
            if csv {
                let _ = writeln!(out, "{k},\"{v}\"");
            } else {
                let _ = writeln!(out, "{k}={v}");
            }
        }
        out
    }
}

pub fn sci(v: f64) -> String {
    format!("{v:.6e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_in_insertion_order() {
        let mut r = Report::default();
        r.text("n", 3).num("residual", 1.5e-13).opt("rate", None).status(true);
        assert_eq!(r.render(false), "n=3\nresidual=1.500000e-13\nrate=none\nstatus=pass\n");
        assert!(r.render(true).starts_with("key,value\nn,\"3\"\n"));
    }
}
