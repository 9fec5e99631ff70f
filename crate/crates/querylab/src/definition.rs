use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum QueryState {
    Draft,
    Submitted,
    Published,
    Rejected,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DataType {
    Alphanumeric,
    Integer,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DropdownOption {
    pub value: String,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "options")]
pub enum DropdownSource {
    /// Every surah by serial number, preceded by `ALL` with value 0.
    SurahList,
    Static(Vec<DropdownOption>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "method", content = "source")]
pub enum InputMethod {
    TextBox,
    Dropdown(DropdownSource),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParameterSpec {
    pub sequence_no: u32,
    pub display_name: String,
    /// Includes the leading `@`.
    pub name: String,
    pub input_method: InputMethod,
    pub data_type: DataType,
    #[serde(default)]
    pub default_value: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HyperlinkKind {
    Subquery,
    AyahSerialNo,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HyperlinkColumn {
    pub hyperlink_id: String,
    pub info_type: HyperlinkKind,
    pub backing_column: String,
    pub targeted_column: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Documentation {
    pub file_name: String,
    pub media_type: String,
    pub size: u64,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryDefinition {
    pub id: String,
    pub title: String,
    #[serde(default)]
    pub description: String,
    #[serde(default)]
    pub documentation: Option<Documentation>,
    pub main_sql: String,
    #[serde(default)]
    pub parameters: Vec<ParameterSpec>,
    #[serde(default)]
    pub detail_sql: Option<String>,
    #[serde(default)]
    pub hyperlink_columns: Vec<HyperlinkColumn>,
    pub state: QueryState,
    #[serde(default)]
    pub topic_path: Vec<String>,
}

impl QueryDefinition {
    pub fn new(id: impl Into<String>, title: impl Into<String>, main_sql: impl Into<String>) -> Self {
        QueryDefinition {
            id: id.into(),
            title: title.into(),
            description: String::new(),
            documentation: None,
            main_sql: main_sql.into(),
            parameters: Vec::new(),
            detail_sql: None,
            hyperlink_columns: Vec::new(),
            state: QueryState::Draft,
            topic_path: Vec::new(),
        }
    }

    pub fn parameter(&self, name: &str) -> Option<&ParameterSpec> {
        let name = name.strip_prefix('@').unwrap_or(name);
        self.parameters.iter().find(|p| p.name.strip_prefix('@') == Some(name))
    }

    pub fn hyperlink(&self, id: &str) -> Option<&HyperlinkColumn> {
        self.hyperlink_columns.iter().find(|h| h.hyperlink_id == id)
    }
}
