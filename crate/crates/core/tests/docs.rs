use std::path::PathBuf;

fn read(rel: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..").join(rel);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn headings(text: &str) -> Vec<&str> {
    text.lines().filter(|l| l.starts_with('#')).map(|l| l.trim_start_matches('#').trim()).collect()
}

#[test]
fn algorithm_notes_cover_every_module() {
    let notes = read("docs/algorithm-notes.md");
    let found = headings(&notes);
    for module in ["model", "instances", "gpi", "dynasearch", "parallel", "ils", "oracle", "harness"] {
        assert!(found.iter().any(|h| h.starts_with(&format!("`{module}`"))), "missing section for {module}");
    }
}

#[test]
fn format_and_reproduction_docs() {
    let format = headings(&read("docs/instance-format.md")).join("\n");
    for section in ["Native format", "OR-library format", "Manifest", "Results file"] {
        assert!(format.contains(section), "instance-format.md lacks {section}");
    }
    let repro = read("docs/reproduction.md");
    for command in ["pmwt generate", "pmwt run", "pmwt table", "PMWT_ACCEPTANCE"] {
        assert!(repro.contains(command), "reproduction.md lacks {command}");
    }
}

#[test]
fn readme_lists_examples() {
    let readme = read("README.md");
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples");
    for entry in std::fs::read_dir(dir).unwrap() {
        let name = entry.unwrap().path().file_stem().unwrap().to_string_lossy().into_owned();
        assert!(readme.contains(&name), "README does not mention example {name}");
    }
}
