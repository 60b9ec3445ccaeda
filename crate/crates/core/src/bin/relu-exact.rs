use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use relu_exact::dichotomy::enumerate_open_dichotomies_geometric;
use relu_exact::driver;
use relu_exact::io::{
    dataset_from_json, dataset_to_json, graph_from_json, metadata_from_json, metadata_to_json, model_from_json,
    model_to_json, read_file, result_to_json, write_file, CliqueMetadata, LossWire, ModelWire,
};
use relu_exact::linf::check_realizable;
use relu_exact::model::{loss_value_with_precision, LossSpec, ReluNetwork};
use relu_exact::reduction::{decode_clique, generate_instance};
use relu_exact::{Error, Rational, Result, TrainConfig};

#[derive(Parser)]
#[command(name = "relu-exact", version, about = "Exact globally optimal training of two-layer ReLU networks")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args)]
struct Global {
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    /// Maximum number of cells a trainer may visit.
    #[arg(long, global = true)]
    budget: Option<u128>,
    /// Bits of precision for irrational loss values.
    #[arg(long, global = true, default_value_t = 64)]
    precision: u32,
}

#[derive(Clone, Copy, ValueEnum)]
enum LossKind {
    Lp,
    Linf,
}

#[derive(Args)]
struct LossArgs {
    #[arg(long, value_enum, default_value = "lp")]
    loss: LossKind,
    /// Exponent for `--loss lp`, as an integer or "num/den".
    #[arg(long, default_value = "1")]
    p: String,
}

impl LossArgs {
    fn spec(&self) -> Result<LossSpec> {
        match self.loss {
            LossKind::Lp => LossSpec::lp(self.p.parse::<Rational>()?),
            LossKind::Linf => Ok(LossSpec::LinfInterval),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Train an optimal network and write the model and result files.
    Train {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        loss: LossArgs,
        /// Model JSON output.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Result JSON output; printed to stdout when omitted.
        #[arg(long)]
        result: Option<PathBuf>,
    },
    /// Build a hard training instance from a colored graph.
    GenClique {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value = "1")]
        p: String,
        /// Dataset JSON output.
        #[arg(long)]
        out: PathBuf,
        /// Metadata JSON output.
        #[arg(long)]
        meta: PathBuf,
    },
    /// Read a clique off a model trained on a generated instance.
    Decode {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        meta: PathBuf,
    },
    /// Print the loss of a model on a dataset.
    Eval {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[command(flatten)]
        loss: LossArgs,
    },
    /// List the open dichotomies of the distinct inputs of a dataset.
    Dichotomies {
        #[arg(long)]
        data: PathBuf,
        /// Print only the number of dichotomies.
        #[arg(long)]
        count: bool,
    },
    /// Decide whether one ReLU fits every label interval exactly.
    CheckRealizable {
        #[arg(long)]
        data: PathBuf,
    },
}

fn config(g: &Global) -> TrainConfig {
    let mut cfg = TrainConfig::default().with_threads(g.threads);
    if let Some(b) = g.budget {
        cfg.cell_budget = b;
    }
    cfg.precision_bits = g.precision;
    cfg
}

fn run(cli: Cli) -> Result<()> {
    let cfg = config(&cli.global);
    match cli.cmd {
        Command::Train { data, k, loss, out, result } => {
            let data = dataset_from_json(&read_file(&data)?)?;
            let res = driver::train(&data, k, &loss.spec()?, &cfg)?;
            if let Some(out) = out {
                let net: ReluNetwork = res.model.clone().try_into()?;
                write_file(&out, &model_to_json(&net)?)?;
            }
            let text = result_to_json(&res)?;
            match result {
                Some(path) => write_file(&path, &text)?,
                None => print!("{text}"),
            }
        }
        Command::GenClique { graph, p, out, meta } => {
            let graph = graph_from_json(&read_file(&graph)?)?;
            let inst = generate_instance(&graph, &p.parse()?)?;
            write_file(&out, &dataset_to_json(&inst.dataset)?)?;
            write_file(&meta, &metadata_to_json(&CliqueMetadata::from(&inst))?)?;
            println!("points {} gamma {} delta {} M {}", inst.dataset.points().len(), inst.gamma, inst.delta, inst.m_copies);
        }
        Command::Decode { model, data, meta } => {
            let net = model_from_json(&read_file(&model)?)?;
            let data = dataset_from_json(&read_file(&data)?)?;
            let out = metadata_from_json(&read_file(&meta)?)?.into_output(data);
            let clique = decode_clique(&net, &out)?;
            println!("{}", clique.join(" "));
        }
        Command::Eval { model, data, loss } => {
            let net = model_from_json(&read_file(&model)?)?;
            let data = dataset_from_json(&read_file(&data)?)?;
            let v = loss_value_with_precision(&net, &data, &loss.spec()?, cfg.precision_bits)?;
            println!("{}", serde_json::to_string(&LossWire::from(&v))?);
        }
        Command::Dichotomies { data, count } => {
            let data = dataset_from_json(&read_file(&data)?)?;
            let (coords, _) = data.distinct_coordinates();
            let dichotomies = enumerate_open_dichotomies_geometric(&coords)?;
            if count {
                println!("{}", dichotomies.len());
            } else {
                for d in &dichotomies {
                    println!("{}", serde_json::to_string(d.plus())?);
                }
            }
        }
        Command::CheckRealizable { data } => {
            let data = dataset_from_json(&read_file(&data)?)?;
            let r = check_realizable(&data)?;
            match r.witness {
                Some((w, b)) if r.realizable => {
                    println!("realizable");
                    let model = ModelWire::from(&ReluNetwork::single(w, b, relu_exact::model::OutputSign::Positive));
                    print!("{}", serde_json::to_string_pretty(&model)? + "\n");
                }
                _ => println!("not realizable"),
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if matches!(e, Error::BudgetExceeded { .. }) { 2 } else { 1 })
        }
    }
}
