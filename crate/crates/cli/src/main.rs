// SPDX-License-Identifier: Apache-2.0

use clap::Parser;

fn main() {
    let cli = classprime_cli::Cli::parse();
    let code = classprime_cli::run(&cli, &mut std::io::stdout().lock(), &mut std::io::stderr().lock());
    std::process::exit(code);
}
