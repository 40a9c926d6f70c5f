use clap::Parser;

fn main() -> anyhow::Result<()> {
    ltag_workbench::cli::run(ltag_workbench::cli::Cli::parse())
}
