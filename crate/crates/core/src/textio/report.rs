use crate::rational::{format_decimal, format_exact, Rational};

/// Result of a query, rendered either for people or as `key=value` lines.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Report {
    pub query: String,
    pub value: Option<Rational>,
    pub verdict: Option<bool>,
    /// Extra facts in display order, e.g. strategy descriptions.
    pub fields: Vec<(String, String)>,
}

impl Report {
    pub fn new(query: impl Into<String>) -> Self {
        Report {
            query: query.into(),
            ..Default::default()
        }
    }

    pub fn with_value(mut self, v: Rational) -> Self {
        self.value = Some(v);
        self
    }

    pub fn with_verdict(mut self, v: bool) -> Self {
        self.verdict = Some(v);
        self
    }

    pub fn field(mut self, key: impl Into<String>, value: impl Into<String>) -> Self {
        self.fields.push((key.into(), value.into()));
        self
    }

    pub fn push_field(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.fields.push((key.into(), value.into()));
    }

    pub fn render_text(&self) -> String {
        let mut out = format!("query: {}\n", self.query);
        if let Some(v) = &self.value {
            out.push_str(&format!(
                "value: {} (~{})\n",
                format_exact(v),
                format_decimal(v, 3)
            ));
        }
        if let Some(v) = self.verdict {
            out.push_str(&format!("verdict: {v}\n"));
        }
        for (k, v) in &self.fields {
            out.push_str(&format!("{k}: {v}\n"));
        }
        out
    }

    /// Flat `key=value` lines; newlines inside values are escaped.
    pub fn render_kv(&self) -> String {
        let esc = |s: &str| s.replace('\\', "\\\\").replace('\n', "\\n");
        let mut out = format!("query={}\n", esc(&self.query));
        if let Some(v) = &self.value {
            out.push_str(&format!("value={}\n", format_exact(v)));
            out.push_str(&format!("value_decimal={}\n", format_decimal(v, 6)));
        }
        if let Some(v) = self.verdict {
            out.push_str(&format!("verdict={v}\n"));
        }
        for (k, v) in &self.fields {
            out.push_str(&format!("{}={}\n", k.replace(' ', "_"), esc(v)));
        }
        out
    }
}
