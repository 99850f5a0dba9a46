//! Line-oriented text format for [`EncodingPlan`].
//!
//! ```text
//! coded-matmul plan v1
//! n 5
//! ka 2
//! kb 2
//! x 0
//! seed 0
//! zeta 2
//! lambda 0 0 0 0 0
//! worker 0 type 0
//! a uncoded 0
//! a coded 4 support 4 9 coefficients 1.2e-1 -3.4e-1
//! b support 0 1 coefficients 5.6e-1 7.8e-1
//! ```
//!
//! Blank lines and lines starting with `#` are ignored. Coefficients are
//! written with 17 significant digits, so a write/read cycle is lossless.
//! Reading only checks syntax and the scheme parameters; the task lists are
//! taken as written so that hand-edited plans can be verified.

use std::fmt::Write as _;
use std::path::Path;
use std::str::{FromStr, SplitWhitespace};

use crate::encoding::{ATask, BSpec, EncodingPlan, WorkerPlan};
use crate::error::{Error, Result};
use crate::scheme::{derive_params, SchemeParams};

const MAGIC: &str = "coded-matmul plan v1";

fn join<T: ToString>(items: &[T]) -> String {
    items.iter().map(T::to_string).collect::<Vec<_>>().join(" ")
}

fn join_f64(items: &[f64]) -> String {
    items
        .iter()
        .map(|v| format!("{v:.16e}"))
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn write_plan(plan: &EncodingPlan) -> String {
    let p = &plan.params;
    let mut out = String::new();
    writeln!(out, "{MAGIC}").unwrap();
    writeln!(out, "n {}", p.n).unwrap();
    writeln!(out, "ka {}", p.ka).unwrap();
    writeln!(out, "kb {}", p.kb).unwrap();
    writeln!(out, "x {}", p.x).unwrap();
    writeln!(out, "seed {}", p.seed).unwrap();
    writeln!(out, "zeta {}", plan.derived.b_weight).unwrap();
    writeln!(out, "lambda {}", join(&plan.lambda)).unwrap();
    for w in &plan.workers {
        writeln!(out, "worker {} type {}", w.worker, w.b.type_id).unwrap();
        for task in &w.a_tasks {
            match task {
                ATask::Uncoded { index } => writeln!(out, "a uncoded {index}").unwrap(),
                ATask::Coded {
                    class,
                    support,
                    coefficients,
                } => writeln!(
                    out,
                    "a coded {class} support {} coefficients {}",
                    join(support),
                    join_f64(coefficients)
                )
                .unwrap(),
            }
        }
        writeln!(
            out,
            "b support {} coefficients {}",
            join(&w.b.support),
            join_f64(&w.b.coefficients)
        )
        .unwrap();
    }
    out
}

struct Cursor<'a> {
    line: usize,
    words: SplitWhitespace<'a>,
}

impl<'a> Cursor<'a> {
    fn word(&mut self) -> Result<&'a str> {
        self.words
            .next()
            .ok_or_else(|| Error::parse(self.line, "unexpected end of line"))
    }

    fn expect(&mut self, keyword: &str) -> Result<()> {
        let w = self.word()?;
        if w == keyword {
            Ok(())
        } else {
            Err(Error::parse(self.line, format!("expected {keyword:?}, found {w:?}")))
        }
    }

    fn value<T: FromStr>(&mut self) -> Result<T> {
        let w = self.word()?;
        w.parse()
            .map_err(|_| Error::parse(self.line, format!("cannot parse {w:?}")))
    }

    /// Values up to (not including) `stop`, or to the end of the line.
    fn list<T: FromStr>(&mut self, stop: Option<&str>) -> Result<Vec<T>> {
        let mut out = Vec::new();
        for w in self.words.by_ref() {
            if Some(w) == stop {
                return Ok(out);
            }
            out.push(
                w.parse()
                    .map_err(|_| Error::parse(self.line, format!("cannot parse {w:?}")))?,
            );
        }
        match stop {
            Some(s) => Err(Error::parse(self.line, format!("missing {s:?}"))),
            None => Ok(out),
        }
    }

    fn finish(&mut self) -> Result<()> {
        match self.words.next() {
            None => Ok(()),
            Some(w) => Err(Error::parse(self.line, format!("unexpected {w:?}"))),
        }
    }
}

pub fn read_plan(text: &str) -> Result<EncodingPlan> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let mut next = |what: &str| -> Result<Cursor<'_>> {
        let (line, text) = lines
            .next()
            .ok_or_else(|| Error::parse(0, format!("missing {what}")))?;
        Ok(Cursor {
            line,
            words: text.split_whitespace(),
        })
    };

    let mut header = next("header")?;
    let magic: Vec<&str> = header.words.by_ref().collect();
    if magic.join(" ") != MAGIC {
        return Err(Error::parse(header.line, "not a plan file"));
    }
    let mut scalar = |key: &str| -> Result<(usize, u64)> {
        let mut c = next(key)?;
        c.expect(key)?;
        let v = c.value()?;
        c.finish()?;
        Ok((c.line, v))
    };
    let (_, n) = scalar("n")?;
    let (_, ka) = scalar("ka")?;
    let (_, kb) = scalar("kb")?;
    let (_, x) = scalar("x")?;
    let (_, seed) = scalar("seed")?;
    let (zeta_line, zeta) = scalar("zeta")?;
    let params = SchemeParams::new(n as usize, ka as usize, kb as usize, x as usize).with_seed(seed);
    let derived = derive_params(&params)?
        .with_b_weight(zeta as usize)
        .map_err(|e| Error::parse(zeta_line, e.to_string()))?;

    let mut c = next("lambda")?;
    c.expect("lambda")?;
    let lambda = c.list(None)?;

    let mut workers: Vec<WorkerPlan> = Vec::new();
    for (line, text) in lines {
        let mut c = Cursor {
            line,
            words: text.split_whitespace(),
        };
        match c.word()? {
            "worker" => {
                let worker = c.value()?;
                c.expect("type")?;
                let type_id = c.value()?;
                c.finish()?;
                workers.push(WorkerPlan {
                    worker,
                    a_tasks: Vec::new(),
                    b: BSpec {
                        support: Vec::new(),
                        coefficients: Vec::new(),
                        type_id,
                    },
                });
            }
            "a" => {
                let w = workers
                    .last_mut()
                    .ok_or_else(|| Error::parse(line, "task before any worker"))?;
                let task = match c.word()? {
                    "uncoded" => {
                        let index = c.value()?;
                        c.finish()?;
                        ATask::Uncoded { index }
                    }
                    "coded" => {
                        let class = c.value()?;
                        c.expect("support")?;
                        let support = c.list(Some("coefficients"))?;
                        let coefficients = c.list(None)?;
                        ATask::Coded {
                            class,
                            support,
                            coefficients,
                        }
                    }
                    other => return Err(Error::parse(line, format!("unknown task kind {other:?}"))),
                };
                w.a_tasks.push(task);
            }
            "b" => {
                let w = workers
                    .last_mut()
                    .ok_or_else(|| Error::parse(line, "B spec before any worker"))?;
                c.expect("support")?;
                w.b.support = c.list(Some("coefficients"))?;
                w.b.coefficients = c.list(None)?;
            }
            other => return Err(Error::parse(line, format!("unknown record {other:?}"))),
        }
    }
    if workers.len() != derived.n {
        return Err(Error::parse(
            0,
            format!("expected {} workers, found {}", derived.n, workers.len()),
        ));
    }
    Ok(EncodingPlan {
        params,
        derived,
        workers,
        lambda,
    })
}

pub fn save_plan(path: impl AsRef<Path>, plan: &EncodingPlan) -> Result<()> {
    std::fs::write(path, write_plan(plan))?;
    Ok(())
}

pub fn load_plan(path: impl AsRef<Path>) -> Result<EncodingPlan> {
    read_plan(&std::fs::read_to_string(path)?)
}
