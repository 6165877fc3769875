//! Command-line front end: build an index from a file, persist and load it,
//! run queries, verify against brute-force oracles, and benchmark.
//!
//! Exit codes: 0 ok, 1 usage, 2 io/corrupt index, 3 verification failure.

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use std::path::PathBuf;
use std::time::Instant;
use synidx::oracle;
use synidx::{BuildConfig, Index, NodeRepr};

#[derive(Parser)]
#[command(
    name = "synidx",
    version,
    about = "Compressed text index: SA/ISA, pattern matching, suffix tree"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct BuildOpts {
    /// Density constant as a fraction, e.g. 1/8
    #[arg(long, default_value = "1/8")]
    mu: String,
    /// Query/space tradeoff exponent as a fraction in (0,1)
    #[arg(long, default_value = "1/2")]
    eps: String,
    /// Explicit window length (testing aid; normally derived from mu)
    #[arg(long)]
    tau: Option<u16>,
    /// Build the sampled structure even for small inputs
    #[arg(long)]
    force_full: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build an index from a text file
    Build {
        /// Input text file (raw bytes)
        path: PathBuf,
        /// Output index file
        #[arg(long, short)]
        out: PathBuf,
        #[command(flatten)]
        opts: BuildOpts,
    },
    /// Print SA[i]
    Sa { index: PathBuf, i: usize },
    /// Print ISA[j]
    Isa { index: PathBuf, j: usize },
    /// Print the number of occurrences of a pattern
    Count { index: PathBuf, pattern: String },
    /// Print all occurrence positions of a pattern (1-based)
    Locate { index: PathBuf, pattern: String },
    /// Print the suffix-array range "b e" of a pattern
    Range { index: PathBuf, pattern: String },
    /// Run one suffix tree operation; nodes read and print as "b:e"
    St {
        index: PathBuf,
        /// Operation: root, sdepth, count, isleaf, index, letter, findleaf,
        /// parent, firstchild, lastchild, rightsibling, leftsibling, child,
        /// pred, wa, lca, slink, slinkk, wlink, wlinkrange, isancestor
        op: String,
        args: Vec<String>,
    },
    /// Check structures against brute-force oracles on random seeds
    Verify {
        /// Optional text file to verify instead of random texts
        #[arg(long)]
        path: Option<PathBuf>,
        #[arg(long, default_value_t = 1000)]
        max_n: usize,
        #[arg(long, default_value_t = 10)]
        seeds: u64,
        #[command(flatten)]
        opts: BuildOpts,
    },
    /// Report load time and query latency percentiles for an index file
    Bench {
        index: PathBuf,
        #[arg(long, default_value_t = 100_000)]
        queries: usize,
        #[arg(long, default_value_t = 2)]
        threads: usize,
    },
}

fn parse_fraction(s: &str) -> Result<(u32, u32)> {
    let (a, b) = s
        .split_once('/')
        .ok_or_else(|| anyhow!("expected a fraction like 1/8, got {s}"))?;
    let num: u32 = a.trim().parse().context("fraction numerator")?;
    let den: u32 = b.trim().parse().context("fraction denominator")?;
    if num == 0 || den == 0 {
        bail!("fraction parts must be positive");
    }
    Ok((num, den))
}

fn config_of(opts: &BuildOpts) -> Result<BuildConfig> {
    let (mu_num, mu_den) = parse_fraction(&opts.mu)?;
    let (eps_num, eps_den) = parse_fraction(&opts.eps)?;
    if mu_num * 6 >= mu_den {
        eprintln!("note: mu >= 1/6 grows the lookup tables beyond the intended regime");
    }
    Ok(BuildConfig {
        mu_num,
        mu_den,
        eps_num,
        eps_den,
        tau_override: opts.tau,
        force_full: opts.force_full,
    })
}

fn load(path: &PathBuf) -> Result<Index> {
    Index::load_from_file(path).with_context(|| format!("loading index {}", path.display()))
}

fn parse_node(s: &str) -> Result<NodeRepr> {
    let (b, e) = s
        .split_once(':')
        .ok_or_else(|| anyhow!("node handle must be b:e, got {s}"))?;
    Ok(NodeRepr::new(b.parse()?, e.parse()?))
}

fn parse_byte(s: &str) -> Result<u8> {
    let bytes = s.as_bytes();
    if bytes.len() == 1 {
        return Ok(bytes[0]);
    }
    if let Some(hex) = s.strip_prefix("0x") {
        return Ok(u8::from_str_radix(hex, 16)?);
    }
    bail!("symbol must be a single byte or 0xNN, got {s}")
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            // usage and help both leave through the usage code
            std::process::exit(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let code = match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            let io_like = e.downcast_ref::<std::io::Error>().is_some()
                || matches!(
                    e.downcast_ref::<synidx::Error>(),
                    Some(synidx::Error::Io(_))
                        | Some(synidx::Error::Corrupt(_))
                        | Some(synidx::Error::Version(_))
                );
            if io_like {
                2
            } else {
                1
            }
        }
    };
    std::process::exit(code);
}

fn run(cli: Cli) -> Result<i32> {
    match cli.cmd {
        Cmd::Build { path, out, opts } => {
            let raw =
                std::fs::read(&path).with_context(|| format!("reading {}", path.display()))?;
            let config = config_of(&opts)?;
            let t0 = Instant::now();
            let idx = Index::build(&raw, &config)?;
            let built = t0.elapsed();
            idx.save_to_file(&out)?;
            let bytes = std::fs::metadata(&out)?.len();
            let mibs = raw.len() as f64 / 1_048_576.0 / built.as_secs_f64();
            println!(
                "built n={} sigma={} tau={} mode={} in {:.2}s ({:.2} MiB/s), index {} bytes",
                idx.n(),
                idx.sigma(),
                idx.tau(),
                if idx.is_fallback() { "plain" } else { "sampled" },
                built.as_secs_f64(),
                mibs,
                bytes
            );
            if let Some((anchors, tau)) = idx.forward().sync_stats() {
                println!(
                    "anchors {} (|S| tau / n = {:.3})",
                    anchors,
                    anchors as f64 * tau as f64 / idx.n() as f64
                );
            }
            Ok(0)
        }
        Cmd::Sa { index, i } => {
            let idx = load(&index)?;
            println!("{}", idx.sa(i)?);
            Ok(0)
        }
        Cmd::Isa { index, j } => {
            let idx = load(&index)?;
            println!("{}", idx.isa(j)?);
            Ok(0)
        }
        Cmd::Count { index, pattern } => {
            let idx = load(&index)?;
            println!("{}", idx.count(pattern.as_bytes())?);
            Ok(0)
        }
        Cmd::Locate { index, pattern } => {
            let idx = load(&index)?;
            let occ = idx.locate(pattern.as_bytes())?;
            let strs: Vec<String> = occ.iter().map(|p| p.to_string()).collect();
            println!("{}", strs.join(" "));
            Ok(0)
        }
        Cmd::Range { index, pattern } => {
            let idx = load(&index)?;
            let (b, e) = idx.range(pattern.as_bytes())?;
            println!("{b} {e}");
            Ok(0)
        }
        Cmd::St { index, op, args } => {
            let idx = load(&index)?;
            st_command(&idx, &op, &args)
        }
        Cmd::Verify {
            path,
            max_n,
            seeds,
            opts,
        } => verify(path, max_n, seeds, &opts),
        Cmd::Bench {
            index,
            queries,
            threads,
        } => bench(&index, queries, threads),
    }
}

fn st_command(idx: &Index, op: &str, args: &[String]) -> Result<i32> {
    let node = |k: usize| -> Result<NodeRepr> {
        parse_node(args.get(k).ok_or_else(|| anyhow!("missing node argument"))?)
    };
    let num = |k: usize| -> Result<usize> {
        Ok(args
            .get(k)
            .ok_or_else(|| anyhow!("missing numeric argument"))?
            .parse()?)
    };
    let byte = |k: usize| -> Result<u8> {
        parse_byte(args.get(k).ok_or_else(|| anyhow!("missing symbol argument"))?)
    };
    match op {
        "root" => println!("{}", idx.root()),
        "sdepth" => println!("{}", idx.st_sdepth(node(0)?)?),
        "count" => println!("{}", idx.st_count(node(0)?)?),
        "isleaf" => println!("{}", idx.st_isleaf(node(0)?)? as u8),
        "index" => println!("{}", idx.st_index(node(0)?)?),
        "letter" => match idx.st_letter(node(0)?, num(1)?)? {
            Some(b) => println!("{}", b as char),
            None => println!("$"),
        },
        "findleaf" => println!("{}", idx.st_findleaf(num(0)?)?),
        "parent" => println!("{}", idx.st_parent(node(0)?)?),
        "firstchild" => println!("{}", idx.st_firstchild(node(0)?)?),
        "lastchild" => println!("{}", idx.st_lastchild(node(0)?)?),
        "rightsibling" => println!("{}", idx.st_rightsibling(node(0)?)?),
        "leftsibling" => println!("{}", idx.st_leftsibling(node(0)?)?),
        "child" => println!("{}", idx.st_child(node(0)?, byte(1)?)?),
        "pred" => {
            let (rank, pnode) = idx.st_pred(node(0)?, byte(1)?)?;
            println!("{rank} {pnode}")
        }
        "wa" => println!("{}", idx.st_wa(node(0)?, num(1)?)?),
        "lca" => println!("{}", idx.st_lca(node(0)?, node(1)?)?),
        "slink" => println!("{}", idx.st_slink(node(0)?)?),
        "slinkk" => println!("{}", idx.st_slink_iter(node(0)?, num(1)?)?),
        "wlink" => println!("{}", idx.st_wlink(node(0)?, byte(1)?)?),
        "wlinkrange" => println!("{}", idx.st_wlink_range(node(0)?, byte(1)?)?),
        "isancestor" => println!("{}", idx.st_isancestor(node(0)?, node(1)?)? as u8),
        other => bail!("unknown suffix tree operation: {other}"),
    }
    Ok(0)
}

/// Differential check of one built index against the oracles; returns an
/// error with a minimal reproducer on the first mismatch.
fn verify_one(raw: &[u8], config: &BuildConfig, rng: &mut rand_chacha::ChaCha8Rng) -> Result<()> {
    let idx = Index::build(raw, config)?;
    let n = idx.n();
    let syms: Vec<u32> = {
        let t = idx.forward().text();
        (0..n).map(|i| t.sym(i)).collect()
    };
    let sa = oracle::naive_sa(&syms);
    for (i, &j) in sa.iter().enumerate() {
        if idx.sa(i + 1)? != j + 1 {
            bail!(
                "sa mismatch at i={} (text prefix {:?})",
                i + 1,
                String::from_utf8_lossy(&raw[..raw.len().min(50)])
            );
        }
        if idx.isa(j + 1)? != i + 1 {
            bail!("isa mismatch at j={}", j + 1);
        }
    }
    for _ in 0..200 {
        let s = rng.gen_range(0..raw.len());
        let l = rng.gen_range(1..=12.min(raw.len() - s));
        let mut pat = raw[s..s + l].to_vec();
        if rng.gen_bool(0.3) {
            let at = rng.gen_range(0..pat.len());
            pat[at] = raw[rng.gen_range(0..raw.len())];
        }
        let Some(pat_syms) = idx.remap(&pat) else {
            continue;
        };
        let expect = oracle::naive_range(&syms, &pat_syms);
        let got = idx.range(&pat)?;
        if got != expect {
            bail!("range mismatch for pattern {:?}", pat);
        }
        let mut occ = idx.locate(&pat)?;
        occ.sort_unstable();
        let expect_occ: Vec<usize> = oracle::naive_occ(&syms, &pat_syms)
            .iter()
            .map(|&x| x + 1)
            .collect();
        if occ != expect_occ {
            bail!("locate mismatch for pattern {:?}", pat);
        }
    }
    if let Some(report) = idx.forward().verify_sync_conditions() {
        if report != oracle::SyncReport::Pass {
            bail!("synchronizing conditions violated: {report:?}");
        }
    }
    if n <= 2000 {
        let st = oracle::NaiveSuffixTree::new(&syms).map_err(|e| anyhow!("oracle: {e}"))?;
        for v in st.all_nodes() {
            let (b, e) = st.repr(v);
            let h = NodeRepr::new(b, e);
            if idx.st_sdepth(h)? != st.sdepth(v) {
                bail!("sdepth mismatch at {h}");
            }
            if let Some(p) = st.parent(v) {
                let (pb, pe) = st.repr(p);
                if idx.st_parent(h)? != NodeRepr::new(pb, pe) {
                    bail!("parent mismatch at {h}");
                }
            }
            for sym in 1..idx.sigma() {
                let byte = idx.forward().text().sym_to_byte(sym);
                let expect = st
                    .child(v, sym)
                    .map(|u| {
                        let (cb, ce) = st.repr(u);
                        NodeRepr::new(cb, ce)
                    })
                    .unwrap_or(NodeRepr::NULL);
                if idx.st_child(h, byte)? != expect {
                    bail!("child mismatch at {h} sym {sym}");
                }
            }
        }
    }
    Ok(())
}

fn verify(path: Option<PathBuf>, max_n: usize, seeds: u64, opts: &BuildOpts) -> Result<i32> {
    let config = config_of(opts)?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0xC0FFEE);
    let outcome = (|| -> Result<()> {
        if let Some(p) = path {
            let raw = std::fs::read(&p)?;
            if raw.len() > max_n {
                bail!("text longer than --max-n {}", max_n);
            }
            verify_one(&raw, &config, &mut rng)?;
            println!("ok: {}", p.display());
            return Ok(());
        }
        for seed in 0..seeds {
            let mut srng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let n = srng.gen_range(2..=max_n.max(2));
            let sigma = [2u8, 2, 3, 4, 16][seed as usize % 5];
            let mut raw: Vec<u8> = (0..n).map(|_| b'a' + srng.gen_range(0..sigma)).collect();
            if seed % 3 == 1 && n > 20 {
                // inject a periodic stretch
                let start = srng.gen_range(0..n / 2);
                let len = srng.gen_range(10..n / 2);
                for x in raw[start..(start + len).min(n)].iter_mut() {
                    *x = b'a';
                }
            }
            verify_one(&raw, &config, &mut rng)?;
            println!("ok: seed {seed} n={n} sigma={sigma}");
        }
        Ok(())
    })();
    match outcome {
        Ok(()) => {
            println!("verification passed");
            Ok(0)
        }
        Err(e) => {
            eprintln!("verification failed: {e:#}");
            Ok(3)
        }
    }
}

fn bench(index: &PathBuf, queries: usize, threads: usize) -> Result<i32> {
    let t0 = Instant::now();
    let idx = load(index)?;
    println!("load {:.3}s", t0.elapsed().as_secs_f64());
    let n = idx.n();
    let threads = threads.max(1);
    let idx_ref = &idx;
    let run_queries = move |seed: u64| -> (Vec<f64>, Vec<f64>) {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let per = queries / threads;
        let mut sa_lat = Vec::with_capacity(per);
        let mut isa_lat = Vec::with_capacity(per);
        let mut sink = 0usize;
        for _ in 0..per {
            let i = rng.gen_range(1..=n);
            let q0 = Instant::now();
            sink ^= idx_ref.sa(i).unwrap();
            sa_lat.push(q0.elapsed().as_secs_f64() * 1e6);
            let j = rng.gen_range(1..=n);
            let q1 = Instant::now();
            sink ^= idx_ref.isa(j).unwrap();
            isa_lat.push(q1.elapsed().as_secs_f64() * 1e6);
        }
        std::hint::black_box(sink);
        (sa_lat, isa_lat)
    };
    let mut all_sa: Vec<f64> = Vec::new();
    let mut all_isa: Vec<f64> = Vec::new();
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..threads as u64)
            .map(|t| scope.spawn(move || run_queries(t)))
            .collect();
        for h in handles {
            let (a, b) = h.join().unwrap();
            all_sa.extend(a);
            all_isa.extend(b);
        }
    });
    let report = |name: &str, v: &mut Vec<f64>| {
        if v.is_empty() {
            return;
        }
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let at = |p: f64| v[((v.len() as f64 * p) as usize).min(v.len() - 1)];
        println!(
            "{name}: p50 {:.2}us p90 {:.2}us p99 {:.2}us max {:.2}us",
            at(0.50),
            at(0.90),
            at(0.99),
            v[v.len() - 1]
        );
    };
    report("sa", &mut all_sa);
    report("isa", &mut all_isa);
    Ok(0)
}
