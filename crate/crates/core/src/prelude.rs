//! The object-language library loaded ahead of user programs.
//!
//! Files load in the order listed here; each uses only itself and earlier files.

use std::io;
use std::path::Path;

pub const FILES: [(&str, &str); 5] = [
    ("lists.pl", include_str!("prelude/lists.pl")),
    ("engines.pl", include_str!("prelude/engines.pl")),
    ("control.pl", include_str!("prelude/control.pl")),
    ("db.pl", include_str!("prelude/db.pl")),
    ("generators.pl", include_str!("prelude/generators.pl")),
];

/// Writes the prelude sources into `dir`, creating it if needed.
pub fn extract(dir: &Path) -> io::Result<()> {
    std::fs::create_dir_all(dir)?;
    for (name, text) in FILES {
        std::fs::write(dir.join(name), text)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::database::DatabaseBuilder;

    #[test]
    fn each_file_needs_only_earlier_files() {
        for upto in 1..=FILES.len() {
            let mut b = DatabaseBuilder::new();
            for (name, text) in &FILES[..upto] {
                b.consult_str(text, Some(name)).unwrap();
            }
            let missing = b.build().undefined_callees();
            assert!(missing.is_empty(), "{}: {:?}", FILES[upto - 1].0, missing);
        }
    }

    #[test]
    fn extracts_every_file() {
        let dir = tempfile::tempdir().unwrap();
        extract(dir.path()).unwrap();
        for (name, text) in FILES {
            assert_eq!(
                std::fs::read_to_string(dir.path().join(name)).unwrap(),
                text
            );
        }
    }
}
