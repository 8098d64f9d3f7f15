//! Drives the command-line front end from code: builds a configuration,
//! writes it out and runs two commands into a scratch directory.

use moving_well::cli::{main_with_args, RunConfig};

fn main() -> moving_well::Result<()> {
    let out = std::env::temp_dir().join("moving-well-example");
    let config = RunConfig { t_end: 200.0, samples: 21, ..Default::default() };
    std::fs::create_dir_all(&out)?;
    let path = out.join("run.txt");
    std::fs::write(&path, config.to_text())?;

    for cmd in ["zeros", "phases"] {
        let code = main_with_args(["moving-well", cmd, "--config", path.to_str().unwrap(), "--out", out.to_str().unwrap()]);
        println!("{cmd}: exit {code}");
    }
    let mut files: Vec<_> = std::fs::read_dir(&out)?.map(|e| e.map(|e| e.file_name())).collect::<Result<_, _>>()?;
    files.sort();
    println!("{files:?}");
    Ok(())
}
