//! Trees as documents: the loadable text form, SVG, or a bracketing.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::derived::{to_svg, write_derived, DerivedNode};
use crate::grammar::{write_tree, ElementaryTree};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExportFormat {
    #[default]
    Text,
    Svg,
    Bracketed,
}

impl ExportFormat {
    pub fn media_type(self) -> &'static str {
        match self {
            ExportFormat::Svg => "image/svg+xml",
            _ => "text/plain; charset=utf-8",
        }
    }
}

impl fmt::Display for ExportFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExportFormat::Text => "text",
            ExportFormat::Svg => "svg",
            ExportFormat::Bracketed => "bracketed",
        })
    }
}

impl FromStr for ExportFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "text" => Ok(ExportFormat::Text),
            "svg" => Ok(ExportFormat::Svg),
            "bracketed" => Ok(ExportFormat::Bracketed),
            _ => Err(format!("unknown export format `{s}` (expected text, svg or bracketed)")),
        }
    }
}

/// Text loads back with [`crate::grammar::load_tree`].
pub fn export_elementary(t: &ElementaryTree, format: ExportFormat) -> String {
    match format {
        ExportFormat::Text => write_tree(t),
        ExportFormat::Svg => to_svg(&DerivedNode::from_elementary(t, 0)),
        ExportFormat::Bracketed => DerivedNode::from_elementary(t, 0).bracketed(),
    }
}

/// Text loads back with [`crate::derived::load_derived`].
pub fn export_derived(n: &DerivedNode, format: ExportFormat) -> String {
    match format {
        ExportFormat::Text => write_derived(n),
        ExportFormat::Svg => to_svg(n),
        ExportFormat::Bracketed => n.bracketed(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derived::{load_derived, DerivedKind};

    #[test]
    fn formats() {
        let n = DerivedNode::new("S", DerivedKind::Interior);
        let svg = export_derived(&n, ExportFormat::Svg);
        assert_eq!(svg.matches("class=\"label\"").count(), 1);
        assert!(!svg.contains("<line"));
        assert_eq!(load_derived(&export_derived(&n, ExportFormat::Text)).unwrap(), n);
        assert_eq!(export_derived(&n, ExportFormat::Bracketed), "(S)");
        assert_eq!("svg".parse::<ExportFormat>().unwrap(), ExportFormat::Svg);
        assert!("ps".parse::<ExportFormat>().is_err());
    }
}
