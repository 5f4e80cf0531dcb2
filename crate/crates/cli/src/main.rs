use clap::Parser;

fn main() {
    let cli = ainf_cli::Cli::parse();
    let out = ainf_cli::run(&cli);
    if let Some(msg) = &out.message {
        eprintln!("ainf: {msg}");
    }
    if let Some(doc) = &out.document {
        if let Err(e) = ainf_cli::write_output(doc, cli.opts.output.as_deref()) {
            eprintln!("ainf: cannot write output: {e}");
            std::process::exit(2);
        }
    }
    std::process::exit(out.code);
}
