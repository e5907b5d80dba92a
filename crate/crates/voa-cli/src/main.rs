//! `voa`: exact computations in free-field vertex algebras.
//!
//! Subcommands: `ope`, `circle`, `wick`, `realize`, `remainder`,
//! `relation`, `decouple`, `verify-appendix`, `selftest`. See `voa help`.
//! Exit codes: 0 success, 1 failed assertion/verification, 2 usage error.

use std::collections::BTreeMap;
use std::process::ExitCode;

use voa_cli::json::{
    self, decoupling_doc, family_name, ope_doc, parse_family, relation_doc, relation_from_doc,
    vpoly_doc,
};
use voa_cli::parse::{parse_vpoly, parse_wpoly};
use voa_cli::selftest;

use voa_core::arith::Rational;
use voa_core::classical::{det_analog, pfaffian, sergeev_minimal, QPoly};
use voa_core::corrections::{
    build_relation, extract_decoupling, raise_decoupling, verify_appendix_with_progress,
    Decoupling, RelationResult,
};
use voa_core::freefield::{circle, ope_all, wick, VPoly};
use voa_core::remainder::RemainderCalc;
use voa_core::wbasis::{realize, Family, FamilyKind};

const USAGE: &str = "\
voa - exact computations in free-field vertex algebras

USAGE:
    voa <COMMAND> [OPTIONS]

COMMANDS:
    ope --a EXPR --b EXPR             all non-negative products a o_n b
    circle --nth N --a EXPR --b EXPR  one circle product (N may be negative)
    wick --a EXPR --b EXPR            the normally ordered product :ab:
    realize --family F --expr EXPR    free-field image of a generator expression
    remainder --family sp --n N --indices I [--method closed|recursive]
    remainder --family o --n N --I LIST --J LIST
    relation --family F --n N (--indices I | --I LIST --J LIST | --sergeev)
    decouple --family F --n N [--up-to M]
    verify-appendix                   check the embedded weight-16 relation
    selftest                          run the identity battery

OPTIONS:
    --family {sp,o,osp}   realization family (rank via --n, default 1)
    --n N                 family rank
    --format {text,json}  output format (default text)
    --max-weight W        refuse relation construction above this weight (default 20)
    --cache-dir DIR       read/write relation JSON documents here
    --threads T           parallel workers for selftest (default 1)
";

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    match run(&args) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            eprintln!("run `voa help` for usage");
            ExitCode::from(2)
        }
    }
}

/// Parsed common options.
struct Opts {
    family: Option<String>,
    n: u16,
    format: Format,
    max_weight: i64,
    cache_dir: Option<String>,
    threads: usize,
    flags: BTreeMap<String, String>,
    switches: Vec<String>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Format {
    Text,
    Json,
}

impl Opts {
    fn parse(args: &[String]) -> Result<Opts, String> {
        let mut flags = BTreeMap::new();
        let mut switches = Vec::new();
        let mut it = args.iter().peekable();
        while let Some(arg) = it.next() {
            let Some(name) = arg.strip_prefix("--") else {
                return Err(format!("unexpected argument {arg:?}"));
            };
            // switches take no value
            if matches!(name, "sergeev") {
                switches.push(name.to_string());
                continue;
            }
            let value = it
                .next()
                .ok_or_else(|| format!("flag --{name} needs a value"))?;
            flags.insert(name.to_string(), value.clone());
        }
        let format = match flags.get("format").map(String::as_str) {
            None | Some("text") => Format::Text,
            Some("json") => Format::Json,
            Some(other) => return Err(format!("unknown format {other:?}")),
        };
        Ok(Opts {
            family: flags.get("family").cloned(),
            n: flags
                .get("n")
                .map(|v| v.parse().map_err(|_| format!("bad rank {v:?}")))
                .transpose()?
                .unwrap_or(1),
            format,
            max_weight: flags
                .get("max-weight")
                .map(|v| v.parse().map_err(|_| format!("bad weight {v:?}")))
                .transpose()?
                .unwrap_or(20),
            cache_dir: flags.get("cache-dir").cloned(),
            threads: flags
                .get("threads")
                .map(|v| v.parse().map_err(|_| format!("bad thread count {v:?}")))
                .transpose()?
                .unwrap_or(1),
            flags,
            switches,
        })
    }

    fn family(&self) -> Result<Family, String> {
        let name = self
            .family
            .as_ref()
            .ok_or_else(|| "missing --family".to_string())?;
        let f = parse_family(name)?;
        Ok(Family { n: self.n, ..f })
    }

    fn required(&self, name: &str) -> Result<&str, String> {
        self.flags
            .get(name)
            .map(String::as_str)
            .ok_or_else(|| format!("missing --{name}"))
    }

    fn index_list(&self, name: &str) -> Result<Vec<i64>, String> {
        self.required(name)?
            .split(',')
            .map(|v| {
                v.trim()
                    .parse::<i64>()
                    .ok()
                    .filter(|&n| (0..=u16::MAX as i64).contains(&n))
                    .ok_or_else(|| format!("bad index {v:?} in --{name}"))
            })
            .collect()
    }
}

fn run(args: &[String]) -> Result<ExitCode, String> {
    let Some(cmd) = args.first() else {
        println!("{USAGE}");
        return Ok(ExitCode::from(2));
    };
    let opts = Opts::parse(&args[1..])?;
    match cmd.as_str() {
        "help" | "--help" | "-h" => {
            println!("{USAGE}");
            Ok(ExitCode::SUCCESS)
        }
        "ope" => cmd_ope(&opts),
        "circle" => cmd_circle(&opts),
        "wick" => cmd_wick(&opts),
        "realize" => cmd_realize(&opts),
        "remainder" => cmd_remainder(&opts),
        "relation" => cmd_relation(&opts),
        "decouple" => cmd_decouple(&opts),
        "verify-appendix" => cmd_verify_appendix(&opts),
        "selftest" => cmd_selftest(&opts),
        other => Err(format!("unknown command {other:?}")),
    }
}

fn print_vpoly(opts: &Opts, p: &VPoly) {
    match opts.format {
        Format::Text => println!("{p}"),
        Format::Json => println!("{}", serde_json::to_string_pretty(&vpoly_doc(p)).unwrap()),
    }
}

fn cmd_ope(opts: &Opts) -> Result<ExitCode, String> {
    let a = parse_vpoly(opts.required("a")?).map_err(|e| e.to_string())?;
    let b = parse_vpoly(opts.required("b")?).map_err(|e| e.to_string())?;
    let table = ope_all(&a, &b);
    match opts.format {
        Format::Text => {
            if table.is_empty() {
                println!("regular (no poles)");
            }
            for (n, p) in &table {
                println!("o_{n}: {p}");
            }
        }
        Format::Json => println!("{}", serde_json::to_string_pretty(&ope_doc(&table)).unwrap()),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_circle(opts: &Opts) -> Result<ExitCode, String> {
    let n: i64 = opts
        .required("nth")?
        .parse()
        .map_err(|_| "bad --nth value".to_string())?;
    let a = parse_vpoly(opts.required("a")?).map_err(|e| e.to_string())?;
    let b = parse_vpoly(opts.required("b")?).map_err(|e| e.to_string())?;
    print_vpoly(opts, &circle(&a, n, &b));
    Ok(ExitCode::SUCCESS)
}

fn cmd_wick(opts: &Opts) -> Result<ExitCode, String> {
    let a = parse_vpoly(opts.required("a")?).map_err(|e| e.to_string())?;
    let b = parse_vpoly(opts.required("b")?).map_err(|e| e.to_string())?;
    print_vpoly(opts, &wick(&a, &b));
    Ok(ExitCode::SUCCESS)
}

fn cmd_realize(opts: &Opts) -> Result<ExitCode, String> {
    let family = opts.family()?;
    let expr = parse_wpoly(opts.required("expr")?).map_err(|e| e.to_string())?;
    print_vpoly(opts, &realize(family, &expr));
    Ok(ExitCode::SUCCESS)
}

fn cmd_remainder(opts: &Opts) -> Result<ExitCode, String> {
    let family = opts.family()?;
    let mut calc = RemainderCalc::new();
    let value = match family.kind {
        FamilyKind::Sp => {
            let indices = opts.index_list("indices")?;
            if indices.len() != 2 * family.n as usize + 2 {
                return Err(format!(
                    "the rank-{} symplectic remainder needs {} indices",
                    family.n,
                    2 * family.n + 2
                ));
            }
            match opts.flags.get("method").map(String::as_str) {
                None | Some("closed") => calc.sym_closed(family.n as usize, &indices),
                Some("recursive") => calc.sym_recursive(family.n as usize, &indices),
                Some(other) => return Err(format!("unknown method {other:?}")),
            }
        }
        FamilyKind::O => {
            let i_list = opts.index_list("I")?;
            let j_list = opts.index_list("J")?;
            if i_list.len() != family.n as usize + 1 || j_list.len() != family.n as usize + 1 {
                return Err(format!(
                    "the rank-{} orthogonal remainder needs {}+{} indices",
                    family.n,
                    family.n + 1,
                    family.n + 1
                ));
            }
            calc.orth_recursive(family.n as usize, &i_list, &j_list)
        }
        FamilyKind::Osp => {
            return Err("no orthosymplectic remainder formula; use `relation --sergeev`".into())
        }
    };
    match opts.format {
        Format::Text => println!("{value}"),
        Format::Json => println!("{}", serde_json::to_string(&value.to_string()).unwrap()),
    }
    Ok(ExitCode::SUCCESS)
}

/// Classical relation selected by the command line, with its index data.
fn classical_input(opts: &Opts, family: Family) -> Result<(QPoly, Vec<Vec<u64>>), String> {
    match family.kind {
        FamilyKind::Sp => {
            let indices = opts.index_list("indices")?;
            let idx16: Vec<u16> = indices.iter().map(|&v| v as u16).collect();
            if idx16.len() != 2 * family.n as usize + 2 {
                return Err(format!("need {} indices", 2 * family.n + 2));
            }
            Ok((
                pfaffian(&idx16, family.n as usize),
                vec![indices.iter().map(|&v| v as u64).collect()],
            ))
        }
        FamilyKind::O => {
            let i_list = opts.index_list("I")?;
            let j_list = opts.index_list("J")?;
            let i16v: Vec<u16> = i_list.iter().map(|&v| v as u16).collect();
            let j16v: Vec<u16> = j_list.iter().map(|&v| v as u16).collect();
            if i16v.len() != family.n as usize + 1 || j16v.len() != family.n as usize + 1 {
                return Err(format!("need {}+{} indices", family.n + 1, family.n + 1));
            }
            Ok((
                det_analog(&i16v, &j16v, family.n as usize),
                vec![
                    i_list.iter().map(|&v| v as u64).collect(),
                    j_list.iter().map(|&v| v as u64).collect(),
                ],
            ))
        }
        FamilyKind::Osp => {
            if !opts.switches.iter().any(|s| s == "sergeev") || family.n != 1 {
                return Err("orthosymplectic relations: only `--sergeev` at rank 1".into());
            }
            Ok((sergeev_minimal(), Vec::new()))
        }
    }
}

fn cache_path(dir: &str, family: Family, indices: &[Vec<u64>]) -> std::path::PathBuf {
    let idx = indices
        .iter()
        .map(|l| {
            l.iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join("_")
        })
        .collect::<Vec<_>>()
        .join("__");
    let fam = family_name(family).replace(['(', ')'], "");
    std::path::Path::new(dir).join(format!("relation-{fam}-{idx}.json"))
}

fn load_cached_relation(
    opts: &Opts,
    family: Family,
    indices: &[Vec<u64>],
) -> Option<RelationResult> {
    let dir = opts.cache_dir.as_ref()?;
    let path = cache_path(dir, family, indices);
    let text = std::fs::read_to_string(path).ok()?;
    let doc: json::RelationDoc = serde_json::from_str(&text).ok()?;
    relation_from_doc(&doc).ok()
}

fn store_cached_relation(opts: &Opts, rel: &RelationResult, indices: &[Vec<u64>]) {
    let Some(dir) = opts.cache_dir.as_ref() else {
        return;
    };
    if std::fs::create_dir_all(dir).is_err() {
        return;
    }
    let path = cache_path(dir, rel.family, indices);
    let doc = relation_doc(rel, indices.to_vec());
    if let Ok(text) = serde_json::to_string_pretty(&doc) {
        let _ = std::fs::write(path, text);
    }
}

fn obtain_relation(
    opts: &Opts,
    family: Family,
    classical: &QPoly,
    indices: &[Vec<u64>],
) -> Result<RelationResult, String> {
    if let Some(rel) = load_cached_relation(opts, family, indices) {
        return Ok(rel);
    }
    let weight = classical
        .terms()
        .next()
        .map(|(m, _)| m.iter().map(|p| p.weight()).sum::<i64>())
        .unwrap_or(0);
    if weight > opts.max_weight {
        return Err(format!(
            "relation weight {weight} exceeds --max-weight {}",
            opts.max_weight
        ));
    }
    let rel = build_relation(family, classical).map_err(|e| format!("{e:?}"))?;
    store_cached_relation(opts, &rel, indices);
    Ok(rel)
}

fn cmd_relation(opts: &Opts) -> Result<ExitCode, String> {
    let family = opts.family()?;
    let (classical, indices) = classical_input(opts, family)?;
    let rel = obtain_relation(opts, family, &classical, &indices)?;
    match opts.format {
        Format::Text => {
            println!("family    = {}", family_name(family));
            println!("weight    = {}", rel.weight);
            println!("kernel_ok = {}", rel.kernel_ok);
            match &rel.remainder {
                Some(r) => println!("remainder = {r}"),
                None => println!("remainder = undefined (odd weight)"),
            }
            for (d, terms) in rel.by_degree().iter().rev() {
                println!("degree {d}: {} terms", terms.len());
                for (c, word) in terms {
                    let word_str = word
                        .iter()
                        .map(|p| format!("Om{},{}[0]", p.a, p.b))
                        .collect::<Vec<_>>()
                        .join(" ");
                    println!("  {c} * :{word_str}:");
                }
            }
        }
        Format::Json => {
            let doc = relation_doc(&rel, indices);
            println!("{}", serde_json::to_string_pretty(&doc).unwrap());
        }
    }
    if rel.kernel_ok {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(1))
    }
}

fn minimal_indices(family: Family) -> (QPoly, Vec<Vec<u64>>) {
    match family.kind {
        FamilyKind::Sp => {
            let idx: Vec<u16> = (0..2 * family.n + 2).collect();
            let ids = vec![idx.iter().map(|&v| v as u64).collect()];
            (pfaffian(&idx, family.n as usize), ids)
        }
        FamilyKind::O => {
            let i_list = vec![0u16; family.n as usize + 1];
            let j_list = vec![1u16; family.n as usize + 1];
            let ids = vec![
                i_list.iter().map(|&v| v as u64).collect(),
                j_list.iter().map(|&v| v as u64).collect(),
            ];
            (det_analog(&i_list, &j_list, family.n as usize), ids)
        }
        FamilyKind::Osp => (sergeev_minimal(), Vec::new()),
    }
}

fn cmd_decouple(opts: &Opts) -> Result<ExitCode, String> {
    let family = opts.family()?;
    let (classical, indices) = minimal_indices(family);
    let rel = obtain_relation(opts, family, &classical, &indices)?;
    let first = extract_decoupling(&rel).map_err(|e| format!("{e:?}"))?;
    let up_to: u16 = opts
        .flags
        .get("up-to")
        .map(|v| v.parse().map_err(|_| format!("bad --up-to {v:?}")))
        .transpose()?
        .unwrap_or(first.m);
    let mut chain = vec![first];
    while chain.last().unwrap().m < up_to {
        let next =
            raise_decoupling(chain.last().unwrap(), &chain).map_err(|e| format!("{e:?}"))?;
        chain.push(next);
    }
    let all_ok = chain.iter().all(Decoupling::verify);
    match opts.format {
        Format::Text => {
            for d in &chain {
                let mut rhs = String::new();
                for (i, (c, w)) in d.expression.iter().enumerate() {
                    let neg = c < &Rational::new(0.into(), 1.into());
                    let mag = if neg { -c.clone() } else { c.clone() };
                    if i == 0 {
                        if neg {
                            rhs.push('-');
                        }
                    } else {
                        rhs.push_str(if neg { " - " } else { " + " });
                    }
                    let ws = w
                        .iter()
                        .map(|(m, k)| format!("W{m}[{k}]"))
                        .collect::<Vec<_>>()
                        .join(" ");
                    rhs.push_str(&format!("{mag} * :{ws}:"));
                }
                println!("w{} = {}", d.m, rhs);
            }
            println!("verified = {all_ok}");
        }
        Format::Json => {
            let docs: Vec<_> = chain.iter().map(decoupling_doc).collect();
            println!("{}", serde_json::to_string_pretty(&docs).unwrap());
        }
    }
    Ok(if all_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_verify_appendix(opts: &Opts) -> Result<ExitCode, String> {
    eprintln!("expected budget: weight 16, word length <= 4, rank-1 orthosymplectic realization");
    let report = verify_appendix_with_progress(|degree, terms| {
        eprintln!("realized the degree-{degree} component ({terms} terms)");
    });
    let expected = Rational::new(109.into(), 56000.into());
    match opts.format {
        Format::Text => {
            println!(
                "kernel_ok={} remainder={}",
                report.kernel_ok, report.remainder
            );
        }
        Format::Json => {
            let doc = serde_json::json!({
                "kernel_ok": report.kernel_ok,
                "remainder": report.remainder.to_string(),
                "residual_terms": report.residual.num_terms(),
            });
            println!("{}", serde_json::to_string_pretty(&doc).unwrap());
        }
    }
    Ok(if report.kernel_ok && report.remainder == expected {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_selftest(opts: &Opts) -> Result<ExitCode, String> {
    let results = selftest::run_all(opts.threads);
    let mut failures = 0;
    for (name, result) in &results {
        match result {
            Ok(()) => println!("ok    {name}"),
            Err(msg) => {
                failures += 1;
                println!("FAIL  {name}: {msg}");
            }
        }
    }
    println!("{} checks, {} failed", results.len(), failures);
    Ok(if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}
