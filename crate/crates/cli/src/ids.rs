//! Name resolution: a token is a name from an identity file or an
//! expression.

use std::path::{Path, PathBuf};

use superlie_core::lang::{self, NamedIdentity};
use superlie_core::{Field, LiePoly};

use crate::CliError;

pub const BUILTIN: &str = include_str!("../identities/builtin.ids");

/// Identity files in lookup order; the built-in file comes last.
#[derive(Debug, Clone, Default)]
pub struct Ids {
    files: Vec<(String, String)>,
    paths: Vec<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct Resolved {
    pub label: String,
    pub poly: LiePoly,
    pub warnings: Vec<String>,
}

impl Ids {
    pub fn builtin() -> Ids {
        Ids::default()
    }

    pub fn load(&mut self, path: &Path) -> Result<(), CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        // Syntax errors surface at load time, whatever the field.
        parse_file(&path.display().to_string(), &text, Field::Rational)?;
        self.files.push((path.display().to_string(), text));
        self.paths.push(path.to_path_buf());
        Ok(())
    }

    /// Paths of the loaded files, for replay commands.
    pub fn paths(&self) -> &[PathBuf] {
        &self.paths
    }

    fn sources(&self) -> impl Iterator<Item = (&str, &str)> {
        self.files.iter().map(|(n, t)| (n.as_str(), t.as_str())).chain([("built-in identities", BUILTIN)])
    }

    pub fn lookup(&self, name: &str, field: Field) -> Result<Option<NamedIdentity>, CliError> {
        for (src, text) in self.sources() {
            if let Some(found) = parse_file(src, text, field)?.into_iter().find(|i| i.name == name) {
                return Ok(Some(found));
            }
        }
        Ok(None)
    }

    pub fn resolve(&self, token: &str, field: Field) -> Result<Resolved, CliError> {
        let token = token.trim();
        if lang::is_identifier(token) {
            if let Some(found) = self.lookup(token, field)? {
                return Ok(Resolved {
                    label: found.name,
                    poly: found.poly,
                    warnings: found.warnings.iter().map(ToString::to_string).collect(),
                });
            }
        }
        let (poly, warnings) = lang::parse(token, field).map_err(|e| CliError::Parse {
            what: format!("{token:?}"),
            message: e.to_string(),
        })?;
        Ok(Resolved {
            label: poly.to_string(),
            poly,
            warnings: warnings.iter().map(ToString::to_string).collect(),
        })
    }

    /// Every identity of one file, in file order.
    pub fn all_in(path: &Path, field: Field) -> Result<Vec<NamedIdentity>, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        parse_file(&path.display().to_string(), &text, field)
    }
}

fn parse_file(src: &str, text: &str, field: Field) -> Result<Vec<NamedIdentity>, CliError> {
    lang::parse_identity_str(text, field).map_err(|source| CliError::IdentityFile {
        path: src.to_string(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use superlie_core::library;

    use super::*;

    #[test]
    fn builtin_names_match_the_library() {
        let q = Field::Rational;
        let ids = Ids::builtin();
        let get = |n: &str| ids.resolve(n, q).unwrap().poly;
        assert_eq!(get("cm"), library::cm(q));
        assert_eq!(get("cp3"), library::cp(q, 3));
        assert_eq!(get("pp3"), library::pp(q, 3));
        assert_eq!(get("tr3"), library::tr(q, 3));
        for k in 0..2 {
            assert_eq!(get(&format!("ja{k}")), library::ja(q, k));
            assert_eq!(get(&format!("nonc1_k{k}")), library::nonc1(q, 3, k));
            assert_eq!(get(&format!("nonc2_k{k}")), library::nonc2(q, 3, k));
        }
        for k in 0..3 {
            assert_eq!(get(&format!("c{k}_plus")), library::c(q, k, 1));
            assert_eq!(get(&format!("c{k}_minus")), library::c(q, k, -1));
        }
        assert_eq!(get("con1"), library::con1(q, 3, 1));
        assert_eq!(get("con2"), library::con2(q, 3, 1));
        assert_eq!(get("con3"), library::con3(q, 3, 1));
        for m in 0..4 {
            assert_eq!(get(&format!("cnz{m}")), library::cnz(q, m));
        }
        let x3 = library::left_normed_x(q, 3);
        assert_eq!(get("ins_src_lx3"), library::insertion_source(&x3));
        assert_eq!(get("ins_g_lx3"), library::insertion(&x3).unwrap());
        let j = library::ja(q, 0);
        assert_eq!(get("ins_src_ja0"), library::insertion_source(&j));
        assert_eq!(get("ins_g_ja0"), library::insertion(&j).unwrap());
    }

    #[test]
    fn names_and_expressions() {
        let ids = Ids::builtin();
        let f3 = Field::prime(3).unwrap();
        assert_eq!(ids.resolve("cm", f3).unwrap().label, "cm");
        let r = ids.resolve("[x,x]", f3).unwrap();
        assert!(r.poly.is_zero());
        assert!(!r.warnings.is_empty());
        // A bare variable is an expression, not a lookup failure.
        assert_eq!(ids.resolve("x", f3).unwrap().poly.to_string(), "x");
        assert!(matches!(ids.resolve("nosuch", f3), Err(CliError::Parse { .. })));
    }

    #[test]
    fn user_files_shadow_builtins() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("mine.ids");
        std::fs::write(&path, "cm: [x,y] = 0\nfoo: [x,y,y] = 0\n").unwrap();
        let mut ids = Ids::builtin();
        ids.load(&path).unwrap();
        assert_eq!(ids.resolve("cm", Field::Rational).unwrap().poly.to_string(), "[x,y]");
        assert_eq!(ids.resolve("ja0", Field::Rational).unwrap().label, "ja0");
        std::fs::write(&path, "a: [x,y] = 0\na: [x,z] = 0\n").unwrap();
        assert!(matches!(Ids::builtin().load(&path), Err(CliError::IdentityFile { .. })));
    }
}
