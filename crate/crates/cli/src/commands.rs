use std::fs;
use std::path::Path;

use avoid1324::oracles::BRUTE_FORCE_LIMIT;
use avoid1324::{
    brute_count, count_signature, crt_combine as combine_runs, decode, encode,
    enumerate as run_enumeration, p1234, p1342, prefix_to_signature, required_prime_count,
    BigCount, BitKey, EnumError, MemoStore, Mode, Pattern, RunManifest, RunOptions, SeriesTable,
    Signature,
};
use num_bigint::BigUint;

use crate::csv::{read_input, write_output};
use crate::{CliError, CrtArgs, EngineMode, EnumerateArgs, SigAction, Toggle, VerifyArgs};

impl From<EnumError> for CliError {
    fn from(e: EnumError) -> Self {
        match e {
            EnumError::CheckFailed { .. } => CliError::Integrity(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

fn parse_primes(text: &str, n: u32) -> Result<Mode, CliError> {
    if text == "auto" {
        return Ok(Mode::auto_crt(n)?);
    }
    let mut primes = text
        .split(',')
        .map(|p| {
            p.trim()
                .parse::<u64>()
                .map_err(|_| usage(format!("bad prime {p:?}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let required = required_prime_count(n, &primes)?;
    let check = (primes.len() > required).then(|| primes.pop()).flatten();
    Ok(Mode::Crt { primes, check })
}

pub fn enumerate(args: EnumerateArgs) -> Result<(), CliError> {
    if !(args.memo_prob > 0.0 && args.memo_prob <= 1.0) {
        return Err(usage(format!(
            "--memo-prob {} is outside (0, 1]",
            args.memo_prob
        )));
    }
    let options = RunOptions {
        store_probability: args.memo_prob,
        factorize: matches!(args.factorize, Toggle::On),
        seed: args.seed,
    };
    let mode = match args.mode {
        EngineMode::Bigint => Mode::BigInt,
        EngineMode::Crt => parse_primes(&args.primes, args.n)?,
    };
    let result = run_enumeration(args.n, &mode, options)?;
    if let Some(dir) = &args.manifest_dir {
        fs::create_dir_all(dir)
            .map_err(|e| usage(format!("cannot create {}: {e}", dir.display())))?;
        for run in result.runs.iter().chain(&result.check_run) {
            let path = dir.join(format!("manifest-{}.txt", run.prime));
            write_output(Some(&path), &run.to_text())?;
        }
    }
    write_output(args.out.as_deref(), &result.table.to_text())
}

pub fn verify(args: VerifyArgs) -> Result<(), CliError> {
    if args.max_n > BRUTE_FORCE_LIMIT {
        return Err(usage(format!(
            "--max-n {} exceeds the brute-force limit {BRUTE_FORCE_LIMIT}",
            args.max_n
        )));
    }
    let pattern: Pattern = args.pattern.parse().map_err(usage)?;
    let reference: Box<dyn Fn(usize) -> Result<BigUint, CliError>> = match args.pattern.as_str() {
        "1324" => {
            let table = avoid1324::enumerate_series(
                args.max_n as u32,
                &Mode::BigInt,
                RunOptions::default(),
            )?;
            Box::new(move |n| Ok(table.coefficients[n].clone()))
        }
        "1234" => Box::new(|n| Ok(p1234(n as u64))),
        "1342" => Box::new(|n| Ok(p1342(n as u64))),
        other => return Err(usage(format!("no reference count for pattern {other}"))),
    };
    let mut out = String::from("n,reference,brute,match\n");
    let mut first_bad = None;
    for n in 0..=args.max_n {
        let expected = reference(n)?;
        let brute = BigUint::from(brute_count(&pattern, n).map_err(usage)?);
        let ok = expected == brute;
        if !ok && first_bad.is_none() {
            first_bad = Some(n);
        }
        out.push_str(&format!(
            "{n},{expected},{brute},{}\n",
            if ok { "yes" } else { "no" }
        ));
    }
    write_output(None, &out)?;
    match first_bad {
        Some(n) => Err(CliError::Mismatch(format!(
            "counts first differ at n = {n}"
        ))),
        None => Ok(()),
    }
}

fn parse_sig(text: &str) -> Result<Signature, CliError> {
    text.parse().map_err(usage)
}

pub fn sig(action: SigAction) -> Result<(), CliError> {
    let text = match action {
        SigAction::Canonical { signature } => format!("{}\n", parse_sig(&signature)?),
        SigAction::Children { signature } => {
            let kids = parse_sig(&signature)?.children().map_err(usage)?;
            kids.iter().map(|k| format!("{k}\n")).collect()
        }
        SigAction::Count { signature } => {
            let sig = parse_sig(&signature)?;
            let mut store = MemoStore::always();
            let count = count_signature(&sig, &mut store, &BigCount, true)?;
            format!("{count}\n")
        }
        SigAction::Encode { signature, binary } => {
            let key = encode(&parse_sig(&signature)?).map_err(usage)?;
            if binary {
                format!("{}\n", key.to_binary())
            } else {
                format!("{}\n", key.to_hex())
            }
        }
        SigAction::Decode { key } => {
            let key = BitKey::from_hex(&key).map_err(usage)?;
            format!("{}\n", decode(&key).map_err(usage)?)
        }
        SigAction::FromPrefix { n, prefix } => {
            format!("{}\n", prefix_to_signature(n, &prefix).map_err(usage)?)
        }
    };
    write_output(None, &text)
}

fn read_manifest(path: &Path) -> Result<RunManifest, CliError> {
    let text = read_input(Some(path))?;
    RunManifest::from_text(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

pub fn crt_combine(args: CrtArgs) -> Result<(), CliError> {
    let runs = args
        .inputs
        .iter()
        .map(|p| read_manifest(p))
        .collect::<Result<Vec<_>, _>>()?;
    let check = args.check.as_deref().map(read_manifest).transpose()?;
    let table: SeriesTable = combine_runs(&runs, check.as_ref())?;
    write_output(args.out.as_deref(), &table.to_text())
}
