use std::io::{ErrorKind, Write};

use anyhow::Context;

fn main() -> anyhow::Result<()> {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let mut out = stdout.lock();
    let mut err = stderr.lock();
    let code = k3stab::cli::run(std::env::args_os(), &mut out, &mut err);
    match out.flush() {
        // the reader went away; nothing left to report
        Err(e) if e.kind() == ErrorKind::BrokenPipe => {}
        r => r.context("flushing stdout")?,
    }
    std::process::exit(code)
}
