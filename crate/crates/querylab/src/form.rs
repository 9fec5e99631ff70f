use serde::{Deserialize, Serialize};

use crate::definition::{DataType, DropdownOption, DropdownSource, InputMethod, QueryDefinition};
use crate::error::Result;
use crate::store::Store;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "control", rename_all = "snake_case")]
pub enum FormControl {
    TextBox,
    Dropdown { options: Vec<DropdownOption> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormField {
    pub name: String,
    pub display_name: String,
    pub data_type: DataType,
    pub default_value: String,
    #[serde(flatten)]
    pub control: FormControl,
}

/// Input fields for a query's parameters, in sequence order, with dropdown
/// sources expanded.
pub fn form_spec(def: &QueryDefinition, store: &Store) -> Result<Vec<FormField>> {
    let mut params: Vec<_> = def.parameters.iter().collect();
    params.sort_by_key(|p| p.sequence_no);
    let mut fields = Vec::with_capacity(params.len());
    for p in params {
        let control = match &p.input_method {
            InputMethod::TextBox => FormControl::TextBox,
            InputMethod::Dropdown(DropdownSource::Static(options)) => FormControl::Dropdown {
                options: options.clone(),
            },
            InputMethod::Dropdown(DropdownSource::SurahList) => {
                let mut options = vec![DropdownOption {
                    value: "0".into(),
                    label: "ALL".into(),
                }];
                options.extend(store.surah_list()?.into_iter().map(|(n, name)| DropdownOption {
                    value: n.to_string(),
                    label: format!("{n} {name}"),
                }));
                FormControl::Dropdown { options }
            }
        };
        fields.push(FormField {
            name: p.name.clone(),
            display_name: p.display_name.clone(),
            data_type: p.data_type,
            default_value: p.default_value.clone(),
            control,
        });
    }
    Ok(fields)
}
