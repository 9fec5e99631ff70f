use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Result, WikiError};

/// A node of the table of contents. The root has an empty name.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WikiTopic {
    pub name: String,
    #[serde(default)]
    pub children: Vec<WikiTopic>,
    #[serde(default)]
    pub queries: Vec<String>,
}

impl WikiTopic {
    pub fn root() -> Self {
        WikiTopic::default()
    }

    pub fn is_empty(&self) -> bool {
        self.children.is_empty() && self.queries.is_empty()
    }

    pub fn child(&self, name: &str) -> Option<&WikiTopic> {
        self.children.iter().find(|c| c.name == name)
    }

    pub fn find(&self, path: &[String]) -> Option<&WikiTopic> {
        path.iter().try_fold(self, |node, name| node.child(name))
    }

    /// Walks `path`, creating missing topics.
    pub(crate) fn ensure(&mut self, path: &[String]) -> &mut WikiTopic {
        let mut node = self;
        for name in path {
            let i = match node.children.iter().position(|c| c.name == *name) {
                Some(i) => i,
                None => {
                    node.children.push(WikiTopic {
                        name: name.clone(),
                        ..WikiTopic::default()
                    });
                    node.children.len() - 1
                }
            };
            node = &mut node.children[i];
        }
        node
    }

    /// Every leaf query id in depth-first order.
    pub fn leaves(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect(&mut out);
        out
    }

    fn collect<'a>(&'a self, out: &mut Vec<&'a str>) {
        out.extend(self.queries.iter().map(String::as_str));
        for c in &self.children {
            c.collect(out);
        }
    }

    pub(crate) fn check_names(&self) -> Result<()> {
        let mut seen = BTreeSet::new();
        for c in &self.children {
            if c.name.trim().is_empty() || !seen.insert(c.name.as_str()) {
                return Err(WikiError::Inconsistent(format!(
                    "topic {:?} has an empty or duplicate child {:?}",
                    self.name, c.name
                )));
            }
            c.check_names()?;
        }
        Ok(())
    }
}

/// Trims each segment and rejects empty paths or segments.
pub fn normalize_path(path: &[String]) -> Result<Vec<String>> {
    if path.is_empty() {
        return Err(WikiError::BadTopicPath("empty path".into()));
    }
    path.iter()
        .map(|p| {
            let t = p.trim();
            if t.is_empty() {
                Err(WikiError::BadTopicPath(format!("empty segment in {path:?}")))
            } else {
                Ok(t.to_string())
            }
        })
        .collect()
}
