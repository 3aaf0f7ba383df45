// SPDX-License-Identifier: Apache-2.0

use std::io::Write;

fn main() {
    let outcome = basespace::cli::run(std::env::args_os());
    let mut out = std::io::stdout().lock();
    // A closed pipe is not worth a panic.
    let _ = out.write_all(outcome.text.as_bytes());
    let _ = out.flush();
    std::process::exit(outcome.code());
}
