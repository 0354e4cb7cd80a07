// SPDX-License-Identifier: Apache-2.0

//! On-disk class-group cache: one JSON-lines file per bucket of 1000
//! discriminants, rewritten through a temporary file and a rename.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use num_integer::Integer;
use rand::seq::IteratorRandom;
use torsion_core::qforms::{cached_class_group, compute_class_group, preload_class_group};
use torsion_core::ClassGroup;

use crate::error::{CliError, CliResult};

const BUCKET: i64 = 1000;

fn bucket(d: &BigInt) -> BigInt {
    d.div_floor(&BigInt::from(BUCKET))
}

pub struct DiskCache {
    dir: PathBuf,
    /// discriminants read from disk during this run
    loaded: BTreeSet<BigInt>,
    read_buckets: BTreeSet<BigInt>,
}

impl DiskCache {
    pub fn open(dir: &Path) -> CliResult<Self> {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        Ok(DiskCache { dir: dir.to_path_buf(), loaded: BTreeSet::new(), read_buckets: BTreeSet::new() })
    }

    fn path(&self, b: &BigInt) -> PathBuf {
        self.dir.join(format!("classgroups_{b}.jsonl"))
    }

    fn read_bucket(&self, b: &BigInt) -> CliResult<Vec<ClassGroup>> {
        let path = self.path(b);
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
            Err(e) => return Err(CliError::io(path, e)),
        };
        text.lines()
            .filter(|l| !l.trim().is_empty())
            .enumerate()
            .map(|(i, l)| {
                serde_json::from_str(l).map_err(|e| {
                    CliError::io(&path, std::io::Error::new(std::io::ErrorKind::InvalidData, format!("line {}: {e}", i + 1)))
                })
            })
            .collect()
    }

    /// Preloads the buckets covering `discs` into the in-process memo.
    pub fn load<'a>(&mut self, discs: impl IntoIterator<Item = &'a BigInt>) -> CliResult<()> {
        let buckets: BTreeSet<BigInt> = discs.into_iter().map(bucket).collect();
        for b in buckets {
            if !self.read_buckets.insert(b.clone()) {
                continue;
            }
            for g in self.read_bucket(&b)? {
                let d = g.d.clone();
                if bucket(&d) != b {
                    continue;
                }
                preload_class_group(g)?;
                self.loaded.insert(d);
            }
        }
        Ok(())
    }

    /// Recomputes one randomly chosen preloaded group and compares.
    pub fn spot_check(&self) -> CliResult<Option<BigInt>> {
        let Some(d) = self.loaded.iter().choose(&mut rand::thread_rng()) else {
            return Ok(None);
        };
        let cached = cached_class_group(d).ok_or_else(|| CliError::Internal(format!("cache entry {d} vanished")))?;
        let fresh = compute_class_group(d, cached.table.is_some())?;
        if fresh.forms != cached.forms || fresh.table != cached.table {
            return Err(CliError::Internal(format!("cached class group for {d} differs from a fresh computation")));
        }
        Ok(Some(d.clone()))
    }

    /// Writes every memoized group among `discs` that is not on disk yet.
    /// Existing entries are never replaced.
    pub fn persist<'a>(&self, discs: impl IntoIterator<Item = &'a BigInt>) -> CliResult<usize> {
        let mut fresh: BTreeMap<BigInt, Vec<_>> = BTreeMap::new();
        for d in discs {
            if self.loaded.contains(d) {
                continue;
            }
            if let Some(g) = cached_class_group(d) {
                fresh.entry(bucket(d)).or_default().push(g);
            }
        }
        let mut written = 0;
        for (b, groups) in fresh {
            let mut entries: BTreeMap<BigInt, String> = BTreeMap::new();
            for g in self.read_bucket(&b)? {
                let line = serde_json::to_string(&g).map_err(|e| CliError::Internal(e.to_string()))?;
                entries.insert(g.d, line);
            }
            let before = entries.len();
            for g in groups {
                if !entries.contains_key(&g.d) {
                    let line = serde_json::to_string(&*g).map_err(|e| CliError::Internal(e.to_string()))?;
                    entries.insert(g.d.clone(), line);
                }
            }
            if entries.len() == before {
                continue;
            }
            written += entries.len() - before;
            self.write_atomic(&self.path(&b), entries.values())?;
        }
        Ok(written)
    }

    fn write_atomic<'a>(&self, path: &Path, lines: impl Iterator<Item = &'a String>) -> CliResult<()> {
        let tmp = path.with_extension(format!("jsonl.tmp{}", std::process::id()));
        let io = |e| CliError::io(&tmp, e);
        let mut f = fs::File::create(&tmp).map_err(io)?;
        for l in lines {
            writeln!(f, "{l}").map_err(io)?;
        }
        f.sync_all().map_err(io)?;
        drop(f);
        fs::rename(&tmp, path).map_err(|e| CliError::io(path, e))
    }
}
