use std::net::{SocketAddr, TcpListener, TcpStream};
use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use dd2pc::harness::{
    digit_loss_probability, precision_experiment, run_lr_benchmark, security_theta_probability, synthetic_dataset,
    verification_failure_experiment, verification_proportion, BenchOptions, DeltaRange, Envelope, FaultOptions,
    PrecisionOptions, SynthSpec, Tabular,
};
use dd2pc::logreg::{predict_secure, train_secure_with, Dataset, ModelFile, PartitionedDataset, TrainConfig};
use dd2pc::numerics::{Interval, Vector};
use dd2pc::runtime::{
    collect_results, open_tcp_party, CsService, PeerEndpoint, SessionConfig, TransportKind, DEFAULT_CS_ADDR_ENV,
};
use dd2pc::s2pm::{MaskConfig, ProtocolConfig};
use dd2pc::transport::{LinkModel, Role, SessionId, TcpLink};
use dd2pc::vector::VectorProtocol;

#[derive(Parser)]
#[command(name = "dd2pc", version, about = "Two-party float computation by data disguising")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// MRE/ARE of the vector protocols across δ-ranges.
    Precision(PrecisionArgs),
    /// Monte Carlo of the masking game next to 1 − 1/θ and 1 − 2/(θ+1).
    SecurityTheta(SecurityArgs),
    /// Analytic and simulated digit-loss probability.
    DigitLoss(DigitArgs),
    /// Tamper with a correction and count how often both parties accept.
    VerifyFail(VerifyFailArgs),
    /// Share of session time spent verifying.
    VerifyProportion(ProportionArgs),
    /// Secure vs plaintext logistic regression on a train/test split.
    BenchLr(BenchArgs),
    /// Train a secure model and save the shares.
    Train(TrainArgs),
    /// Score a CSV with a saved model.
    Predict(PredictArgs),
    /// Write a synthetic dataset shaped like one of the benchmark sets.
    GenData(GenArgs),
    /// Run one node of a multi-process deployment.
    Node(NodeArgs),
}

#[derive(Copy, Clone, ValueEnum)]
enum Transport {
    Mem,
    Tcp,
}

impl From<Transport> for TransportKind {
    fn from(t: Transport) -> Self {
        match t {
            Transport::Mem => TransportKind::Mem,
            Transport::Tcp => TransportKind::Tcp,
        }
    }
}

#[derive(Args, Clone)]
struct Common {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// JSON report path; a CSV is written next to it for tabular reports.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct ProtoFlags {
    #[arg(long, default_value_t = 2)]
    rho: usize,
    /// Mask range over data range.
    #[arg(long, default_value_t = 1.0)]
    theta: f64,
    /// Verification rounds per multiplication.
    #[arg(long, default_value_t = 20)]
    l: u32,
    #[arg(long)]
    unbatched: bool,
    #[arg(long, value_enum, default_value = "mem")]
    transport: Transport,
    #[arg(long, default_value_t = 0)]
    latency_ms: u64,
}

impl ProtoFlags {
    fn protocol(&self) -> Result<ProtocolConfig> {
        let p = ProtocolConfig::default()
            .with_rho(self.rho)
            .with_verify_rounds(self.l)
            .with_batching(!self.unbatched)
            .with_mask(MaskConfig::new(Interval::new(-1.0, 1.0)?, self.theta)?);
        p.validate()?;
        Ok(p)
    }

    fn session(&self, seed: u64) -> Result<SessionConfig> {
        Ok(SessionConfig::new(seed)
            .with_protocol(self.protocol()?)
            .with_transport(self.transport.into())
            .with_link(LinkModel::latency_ms(self.latency_ms)))
    }
}

#[derive(Args)]
struct PrecisionArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    proto: ProtoFlags,
    /// Protocols to sweep; all four by default.
    #[arg(long, value_delimiter = ',')]
    protocol: Vec<VectorProtocol>,
    #[arg(long, default_value_t = 500)]
    n: usize,
    #[arg(long, default_value_t = 10)]
    trials: usize,
    #[arg(long, value_delimiter = ',', default_values_t = [0u32, 2, 4, 6, 8])]
    ranges: Vec<u32>,
    #[arg(long)]
    parallel: bool,
}

#[derive(Args)]
struct SecurityArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, value_delimiter = ',', default_values_t = [3.0, 100.0, 10000.0])]
    theta: Vec<f64>,
    #[arg(long, default_value_t = 100_000)]
    trials: usize,
}

#[derive(Args)]
struct DigitArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = 500)]
    n: u32,
    #[arg(long, value_delimiter = ',', default_values_t = [3u32, 4])]
    d: Vec<u32>,
    #[arg(long, default_value_t = 100_000)]
    trials: usize,
}

#[derive(Args)]
struct VerifyFailArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, value_delimiter = ',', default_values_t = [1u32, 2, 4])]
    l: Vec<u32>,
    #[arg(long, default_value_t = 10_000)]
    trials: usize,
    /// Added to one entry of the tampered correction; 0 runs honestly.
    #[arg(long, default_value_t = 1.0)]
    magnitude: f64,
    #[arg(long)]
    parallel: bool,
}

#[derive(Args)]
struct ProportionArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value = "s2php")]
    protocol: VectorProtocol,
    #[arg(long, value_delimiter = ',', default_values_t = [100usize, 200, 400])]
    dims: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = [0u32, 5, 10, 20])]
    l: Vec<u32>,
    #[arg(long, default_value_t = 3)]
    repeats: usize,
}

#[derive(Args, Clone)]
struct TrainFlags {
    #[arg(long, default_value_t = 0.05)]
    eta: f64,
    #[arg(long, default_value_t = 32)]
    batch_size: usize,
    #[arg(long, default_value_t = 5)]
    iterations: usize,
    /// First column held by Bob; Alice holds the ones before it.
    #[arg(long)]
    split_point: Option<usize>,
    /// Min-max scale features, fitted on the training rows.
    #[arg(long)]
    scale: bool,
}

impl TrainFlags {
    fn config(&self, proto: &ProtoFlags, seed: u64) -> Result<TrainConfig> {
        let cfg = TrainConfig {
            eta: self.eta,
            batch_size: self.batch_size,
            iterations: self.iterations,
            rho: proto.rho,
            verify_rounds: proto.l,
            seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn split_point(&self, features: usize) -> usize {
        self.split_point.unwrap_or(features / 2)
    }
}

#[derive(Copy, Clone, ValueEnum)]
enum Synthetic {
    Raisin,
    German,
}

impl Synthetic {
    fn spec(self) -> (&'static str, SynthSpec, usize) {
        match self {
            Synthetic::Raisin => ("synthetic-raisin", SynthSpec::RAISIN, 720),
            Synthetic::German => ("synthetic-german", SynthSpec::GERMAN, 800),
        }
    }
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    proto: ProtoFlags,
    #[command(flatten)]
    train: TrainFlags,
    /// CSV with a trailing `label` column.
    #[arg(long, conflicts_with = "synthetic", required_unless_present = "synthetic")]
    data: Option<PathBuf>,
    #[arg(long, value_enum)]
    synthetic: Option<Synthetic>,
    /// Rows used for training; 80% when omitted.
    #[arg(long)]
    train_rows: Option<usize>,
    #[arg(long, default_value_t = 0.5)]
    threshold: f64,
}

#[derive(Args)]
struct TrainArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    proto: ProtoFlags,
    #[command(flatten)]
    train: TrainFlags,
    #[arg(long)]
    data: PathBuf,
    /// Where the model shares go.
    #[arg(long, default_value = "model.json")]
    model: PathBuf,
}

#[derive(Args)]
struct PredictArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    proto: ProtoFlags,
    #[arg(long)]
    data: PathBuf,
    #[arg(long, default_value = "model.json")]
    model: PathBuf,
    #[arg(long)]
    split_point: Option<usize>,
    #[arg(long, default_value_t = 0.5)]
    threshold: f64,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    kind: Synthetic,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Copy, Clone, ValueEnum)]
enum NodeRole {
    Cs,
    Alice,
    Bob,
    Client,
}

#[derive(Args)]
struct NodeArgs {
    #[arg(long, value_enum)]
    role: NodeRole,
    /// Listen address: the CS service, Alice's peer port or the client.
    #[arg(long)]
    bind: Option<SocketAddr>,
    /// Bob only: Alice's address.
    #[arg(long)]
    peer: Option<SocketAddr>,
    #[arg(long, env = DEFAULT_CS_ADDR_ENV)]
    cs: Option<SocketAddr>,
    /// Data holders: where to send the result share.
    #[arg(long)]
    client: Option<SocketAddr>,
    /// 32 hex digits; derived from the seed when omitted.
    #[arg(long)]
    session: Option<SessionId>,
    #[arg(long, default_value = "s2php")]
    protocol: VectorProtocol,
    /// Data holders: JSON array with this party's input vector.
    #[arg(long)]
    input: Option<PathBuf>,
    /// CS only: exit after this many sessions.
    #[arg(long)]
    sessions: Option<usize>,
    #[arg(long, default_value_t = 30)]
    timeout_s: u64,
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    proto: ProtoFlags,
}

/// Prints the envelope, or writes it to `--out`.
fn emit<T: Serialize>(common: &Common, kind: &str, data: &T) -> Result<()> {
    let env = Envelope::new(kind, data);
    match &common.out {
        Some(p) => env.write_json(p).with_context(|| format!("writing {}", p.display()))?,
        None => println!("{}", env.to_json()?),
    }
    Ok(())
}

fn emit_table<T: Serialize + Tabular>(common: &Common, kind: &str, data: T) -> Result<()> {
    emit(common, kind, &data)?;
    if let Some(p) = &common.out {
        let csv = p.with_extension("csv");
        data.write_csv(&csv).with_context(|| format!("writing {}", csv.display()))?;
    }
    Ok(())
}

fn load_scaled(path: &Path, train_rows: usize, scale: bool) -> Result<Dataset> {
    let mut data = Dataset::load_csv(path).with_context(|| format!("loading {}", path.display()))?;
    if scale {
        let (train, _) = data.split_at(train_rows)?;
        let scaler = dd2pc::logreg::MinMaxScaler::fit(&train.x);
        data.x = scaler.transform(&data.x)?;
    }
    Ok(data)
}

fn precision(a: PrecisionArgs) -> Result<()> {
    let protocols = if a.protocol.is_empty() { VectorProtocol::ALL.to_vec() } else { a.protocol };
    let ranges = a.ranges.iter().map(|&x| DeltaRange::new(x)).collect::<dd2pc::Result<Vec<_>>>()?;
    let mut opts = PrecisionOptions::new(a.n, a.trials, a.common.seed);
    opts.protocol = a.proto.protocol()?;
    opts.parallel = a.parallel;
    let mut reports = Vec::new();
    for p in protocols {
        let r = precision_experiment(p, &ranges, &opts)?;
        for rr in &r.ranges {
            eprintln!("{p:<7} x={} mre={:.3e} are={:.3e}", rr.x, rr.mre, rr.are);
        }
        reports.push(r);
    }
    emit_table(&a.common, "precision", reports)
}

fn security(a: SecurityArgs) -> Result<()> {
    let reports = a
        .theta
        .iter()
        .map(|&t| security_theta_probability(t, a.trials, a.common.seed))
        .collect::<dd2pc::Result<Vec<_>>>()?;
    emit_table(&a.common, "security-theta", reports)
}

fn digits(a: DigitArgs) -> Result<()> {
    let reports = a
        .d
        .iter()
        .map(|&d| digit_loss_probability(a.n, d, a.trials, a.common.seed))
        .collect::<dd2pc::Result<Vec<_>>>()?;
    emit_table(&a.common, "digit-loss", reports)
}

fn verify_fail(a: VerifyFailArgs) -> Result<()> {
    let opts = FaultOptions {
        parallel: a.parallel,
        ..FaultOptions::default()
    };
    let reports = a
        .l
        .iter()
        .map(|&l| verification_failure_experiment(l, a.magnitude, a.trials, a.common.seed, &opts))
        .collect::<dd2pc::Result<Vec<_>>>()?;
    emit_table(&a.common, "verify-fail", reports)
}

fn proportion(a: ProportionArgs) -> Result<()> {
    let rows = verification_proportion(a.protocol, &a.dims, &a.l, a.repeats, a.common.seed)?;
    emit_table(&a.common, "verify-proportion", rows)
}

fn bench(a: BenchArgs) -> Result<()> {
    let (name, data) = match (&a.data, a.synthetic) {
        (Some(p), _) => {
            let rows = Dataset::load_csv(p)?.rows();
            let train = a.train_rows.unwrap_or(rows * 4 / 5);
            (p.display().to_string(), load_scaled(p, train, a.train.scale)?)
        }
        (None, Some(s)) => {
            let (name, spec, _) = s.spec();
            (name.to_string(), synthetic_dataset(spec, a.common.seed)?)
        }
        (None, None) => bail!("give --data or --synthetic"),
    };
    let train_rows = a
        .train_rows
        .or_else(|| a.synthetic.map(|s| s.spec().2))
        .unwrap_or(data.rows() * 4 / 5);
    let cfg = a.train.config(&a.proto, a.common.seed)?;
    let opts = BenchOptions {
        name,
        train_rows,
        split_point: a.train.split_point(data.features()),
        threshold: a.threshold,
        transport: a.proto.transport.into(),
    };
    let r = run_lr_benchmark(&data, &opts, &cfg)?;
    eprintln!(
        "secure acc {:.4}  plain acc {:.4}  gap {:.4}",
        r.secure.accuracy, r.plain.accuracy, r.accuracy_gap
    );
    emit_table(&a.common, "bench-lr", r)
}

fn train(a: TrainArgs) -> Result<()> {
    let raw = Dataset::load_csv(&a.data)?;
    let data = load_scaled(&a.data, raw.rows(), a.train.scale)?;
    let cfg = a.train.config(&a.proto, a.common.seed)?;
    let part = PartitionedDataset::from_dataset(&data, a.train.split_point(data.features()))?;
    let session = a.proto.session(a.common.seed)?;
    let run = train_secure_with(&part, &cfg, &session)?;
    ModelFile::new(&run.model, cfg)?
        .save(&a.model)
        .with_context(|| format!("writing {}", a.model.display()))?;
    eprintln!("model written to {}", a.model.display());
    #[derive(Serialize)]
    struct TrainSummary {
        model: PathBuf,
        w: Vec<f64>,
        rounds: u64,
        payload_bits: u64,
        phases: dd2pc::runtime::PhaseTimes,
    }
    emit(
        &a.common,
        "train",
        &TrainSummary {
            model: a.model.clone(),
            w: run.model.merged()?.into_vec(),
            rounds: run.report.rounds(),
            payload_bits: run.report.payload_bits(),
            phases: run.report.phases(),
        },
    )
}

fn predict(a: PredictArgs) -> Result<()> {
    let data = Dataset::load_csv(&a.data)?;
    let file = ModelFile::load(&a.model).with_context(|| format!("reading {}", a.model.display()))?;
    let model = file.shares()?;
    if model.features() != data.features() {
        bail!("model has {} features, data has {}", model.features(), data.features());
    }
    let part = PartitionedDataset::from_dataset(&data, a.split_point.unwrap_or(data.features() / 2))?;
    let session = a.proto.session(a.common.seed)?;
    let (shares, report) = predict_secure(&part.x_a, &part.x_b, &model, &session)?;
    let scores = shares.reconstruct()?;
    let metrics = dd2pc::logreg::evaluate(&data.y, &scores, a.threshold)?;
    #[derive(Serialize)]
    struct PredictSummary {
        scores: Vec<f64>,
        metrics: dd2pc::logreg::MetricsReport,
        rounds: u64,
        payload_bits: u64,
    }
    emit(
        &a.common,
        "predict",
        &PredictSummary {
            scores: scores.into_vec(),
            metrics,
            rounds: report.rounds(),
            payload_bits: report.payload_bits(),
        },
    )
}

fn gen_data(a: GenArgs) -> Result<()> {
    let (_, spec, _) = a.kind.spec();
    synthetic_dataset(spec, a.seed)?.save_csv(&a.out)?;
    eprintln!("wrote {} rows to {}", spec.rows, a.out.display());
    Ok(())
}

fn node(a: NodeArgs) -> Result<()> {
    let timeout = Duration::from_secs(a.timeout_s);
    let mut cfg = a.proto.session(a.common.seed)?.with_timeout(timeout);
    if let Some(id) = a.session {
        cfg.id = id;
    }
    let need = |v: Option<SocketAddr>, flag: &str| v.with_context(|| format!("--{flag} is required for this role"));
    match a.role {
        NodeRole::Cs => {
            let svc = CsService::bind(need(a.bind, "bind")?, a.common.seed)?.with_timeout(timeout);
            eprintln!("cs listening on {}", svc.local_addr()?);
            svc.serve(a.sessions, |r| match r {
                Ok(report) => println!("{}", serde_json::to_string(&Envelope::new("cs-session", &report)).unwrap_or_default()),
                Err(e) => eprintln!("cs session failed: {e}"),
            })?;
            Ok(())
        }
        NodeRole::Client => {
            let listener = TcpListener::bind(need(a.bind, "bind")?)?;
            eprintln!("client listening on {} for session {}", listener.local_addr()?, cfg.id);
            let (sa, sb) = collect_results(&listener, cfg.id, timeout)?;
            let result = a.protocol.reconstruct(&sa.to_vector()?, &sb.to_vector()?)?;
            emit(&a.common, "node-result", &result.into_vec())
        }
        NodeRole::Alice | NodeRole::Bob => {
            let role = if matches!(a.role, NodeRole::Alice) { Role::Alice } else { Role::Bob };
            let peer = match role {
                Role::Alice => PeerEndpoint::Listen(need(a.bind, "bind")?),
                _ => PeerEndpoint::Connect(need(a.peer, "peer")?),
            };
            let cs = need(a.cs, "cs")?;
            let client = need(a.client, "client")?;
            let path = a.input.context("--input is required for data holders")?;
            let text = std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
            let x = Vector::new(serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?)?;
            let plan = a.protocol.plan(x.len(), cfg.protocol.split.rho);
            let mut sess = open_tcp_party(role, &cfg, peer, cs)?;
            sess.open(&plan)?;
            let share = sess.guard(|s| a.protocol.party(s, &x))?;
            let mut link = TcpLink::new(TcpStream::connect(client)?)?;
            sess.send_result(&mut link, &share.to_column())?;
            emit(&a.common, "node-party", &sess.report())
        }
    }
}

fn main() -> Result<()> {
    match Cli::parse().cmd {
        Cmd::Precision(a) => precision(a),
        Cmd::SecurityTheta(a) => security(a),
        Cmd::DigitLoss(a) => digits(a),
        Cmd::VerifyFail(a) => verify_fail(a),
        Cmd::VerifyProportion(a) => proportion(a),
        Cmd::BenchLr(a) => bench(a),
        Cmd::Train(a) => train(a),
        Cmd::Predict(a) => predict(a),
        Cmd::GenData(a) => gen_data(a),
        Cmd::Node(a) => node(a),
    }
}
