use clap::Parser;

fn main() -> anyhow::Result<()> {
    ptmswarm_cli::run(ptmswarm_cli::Cli::parse())
}
