use std::path::{Path, PathBuf};

use super::ast::{Item, Program};
use super::lexer::tokenize;
use super::parser::parse_fragment;
use super::FrontendError;

/// The standard gate library, resolved without touching the filesystem.
pub const QELIB1: &str = include_str!("qelib1.inc");
pub const QELIB1_NAME: &str = "qelib1.inc";

/// Splices every `include` in place. `qelib1.inc` always resolves to the
/// bundled copy; other paths are relative to `base_path` (or to the directory
/// of the including file for nested includes).
pub fn resolve_includes(program: Program, base_path: &Path) -> Result<Program, FrontendError> {
    let mut stack = Vec::new();
    let items = splice(program.items, base_path, &mut stack)?;
    Ok(Program {
        version: program.version,
        items,
    })
}

fn splice(items: Vec<Item>, base: &Path, stack: &mut Vec<PathBuf>) -> Result<Vec<Item>, FrontendError> {
    let mut out = Vec::with_capacity(items.len());
    for item in items {
        let Item::Include(inc) = item else {
            out.push(item);
            continue;
        };
        let (key, source, dir) = if inc.path == QELIB1_NAME {
            (PathBuf::from(QELIB1_NAME), QELIB1.to_string(), base.to_path_buf())
        } else {
            let full = base.join(&inc.path);
            let source = std::fs::read_to_string(&full).map_err(|_| FrontendError::IncludeNotFound {
                path: inc.path.clone(),
                line: inc.pos.line,
                col: inc.pos.col,
            })?;
            let key = full.canonicalize().unwrap_or(full.clone());
            let dir = full.parent().map_or_else(|| base.to_path_buf(), Path::to_path_buf);
            (key, source, dir)
        };
        if stack.contains(&key) {
            return Err(FrontendError::IncludeCycle {
                path: inc.path.clone(),
                line: inc.pos.line,
                col: inc.pos.col,
            });
        }
        let in_file = |error: FrontendError| FrontendError::InFile {
            file: inc.path.clone(),
            error: Box::new(error),
        };
        let tokens = tokenize(&source).map_err(in_file)?;
        let nested = parse_fragment(&tokens).map_err(in_file)?;
        stack.push(key);
        let nested = splice(nested, &dir, stack);
        stack.pop();
        out.extend(nested?);
    }
    Ok(out)
}
