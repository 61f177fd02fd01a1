//! Seeded counterexample search over sites and relations.
//!
//! Work is split into one job per site. Each job draws its relations from a
//! seed derived only from the run seed and the site's position, so the
//! report does not depend on how many threads ran it.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::axioms::{AxiomId, Side};
use crate::claims::{verify_claims, Claim, ClaimStatus, Subject};
use crate::curate::horn_interior;
use crate::operators::{closure_extension, monotonise, monotonise_naive, star};
use crate::relation::{
    builtin_a_indep, builtin_full, random_invariant_relation, RelationFile, TernaryRelation, EXTENSIONAL_MAX,
};
use crate::site::{ClosureOperator, Permutation, RawSite, Site, SymmetryGroup};
use crate::subset::Subset;
use crate::verdict::Verdict;

/// Largest ground set for which every Moore family can be listed.
pub const EXHAUSTIVE_MAX: usize = 4;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum SearchError {
    #[error("ground size {0} outside 1..={max}", max = EXTENSIONAL_MAX)]
    GroundSize(usize),
    #[error("exhaustive Moore-family enumeration needs n <= {EXHAUSTIVE_MAX}, got {0}")]
    ExhaustiveTooLarge(usize),
    #[error("empty range {0}..{1}")]
    EmptyRange(usize, usize),
    #[error("density {0} outside [0, 1]")]
    Density(f64),
    #[error("no densities given")]
    NoDensities,
    #[error("thread pool: {0}")]
    Pool(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClosureMode {
    /// Every Moore family for small n, `random_sites` seeded ones beyond.
    Auto,
    Exhaustive,
    Random,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GroupMode {
    Trivial,
    /// All permutations preserving the closure operator; the full symmetric
    /// group whenever the closure is symmetric.
    Automorphisms,
    /// The subgroup generated by one random non-identity automorphism.
    Sampled,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchParams {
    pub n_min: usize,
    pub n_max: usize,
    pub closure_mode: ClosureMode,
    /// Moore families drawn per n when not enumerating.
    pub random_sites: usize,
    pub group_modes: Vec<GroupMode>,
    /// Random relations per site, spread round-robin over `densities`.
    pub samples: usize,
    pub densities: Vec<f64>,
    /// Add curated relations (builtins, operator images, Horn interiors).
    pub curated: bool,
    pub seed: u64,
    #[serde(skip)]
    pub jobs: usize,
    pub max_bundles: usize,
}

impl Default for SearchParams {
    fn default() -> Self {
        SearchParams {
            n_min: 3,
            n_max: 3,
            closure_mode: ClosureMode::Auto,
            random_sites: 20,
            group_modes: vec![GroupMode::Trivial, GroupMode::Automorphisms],
            samples: 50,
            densities: vec![0.2, 0.5, 0.8],
            curated: true,
            seed: 0,
            jobs: 1,
            max_bundles: 5,
        }
    }
}

impl SearchParams {
    pub fn validate(&self) -> Result<(), SearchError> {
        if self.n_min > self.n_max {
            return Err(SearchError::EmptyRange(self.n_min, self.n_max));
        }
        for n in [self.n_min, self.n_max] {
            if !(1..=EXTENSIONAL_MAX).contains(&n) {
                return Err(SearchError::GroundSize(n));
            }
        }
        if self.closure_mode == ClosureMode::Exhaustive && self.n_max > EXHAUSTIVE_MAX {
            return Err(SearchError::ExhaustiveTooLarge(self.n_max));
        }
        if self.densities.is_empty() {
            return Err(SearchError::NoDensities);
        }
        if let Some(&d) = self.densities.iter().find(|d| !(0.0..=1.0).contains(*d)) {
            return Err(SearchError::Density(d));
        }
        Ok(())
    }

    fn exhaustive(&self, n: usize) -> bool {
        match self.closure_mode {
            ClosureMode::Exhaustive => true,
            ClosureMode::Random => false,
            ClosureMode::Auto => n <= 3,
        }
    }
}

/// SplitMix64 finaliser, used to derive independent seeds from a path.
pub fn derive_seed(seed: u64, path: &[u64]) -> u64 {
    let mix = |mut z: u64| {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    };
    path.iter().fold(mix(seed), |acc, &p| mix(acc ^ mix(p)))
}

fn intersection_closure(n: usize, generators: impl IntoIterator<Item = Subset>) -> Vec<Subset> {
    let mut family: BTreeSet<Subset> = BTreeSet::from([Subset::full(n)]);
    let mut frontier: Vec<Subset> = generators.into_iter().collect();
    while let Some(s) = frontier.pop() {
        if !family.insert(s) {
            continue;
        }
        frontier.extend(family.iter().map(|&t| t.intersect(s)).filter(|t| !family.contains(t)));
    }
    family.into_iter().collect()
}

/// Every Moore family on `n` points, each as its sorted closed sets, in
/// lexicographic order of those lists.
pub fn moore_families(n: usize) -> Vec<Vec<Subset>> {
    assert!(
        n <= EXHAUSTIVE_MAX,
        "exhaustive enumeration capped at n = {EXHAUSTIVE_MAX}"
    );
    let proper: Vec<Subset> = Subset::all(n).filter(|&s| s != Subset::full(n)).collect();
    // every family is the intersection closure of its own proper members
    let mut seen = BTreeSet::new();
    for mask in 0u64..(1 << proper.len()) {
        let gens = proper
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &s)| s);
        seen.insert(intersection_closure(n, gens));
    }
    seen.into_iter().collect()
}

/// Seeded Moore family: the intersection closure of up to `2n` random sets.
pub fn random_moore_family(n: usize, seed: u64) -> Vec<Subset> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = rng.gen_range(0..=2 * n);
    let gens: Vec<Subset> = (0..k).map(|_| Subset(rng.gen_range(0..1u32 << n))).collect();
    intersection_closure(n, gens)
}

fn group_for(cl: &ClosureOperator, mode: GroupMode, seed: u64) -> Option<SymmetryGroup> {
    let n = cl.n();
    match mode {
        GroupMode::Trivial => Some(SymmetryGroup::trivial(n)),
        GroupMode::Automorphisms => {
            let auts: Vec<Permutation> = cl.automorphisms().into_iter().filter(|p| !p.is_identity()).collect();
            (!auts.is_empty()).then(|| SymmetryGroup::generate(n, auts, usize::MAX).expect("uncapped"))
        }
        GroupMode::Sampled => {
            let auts: Vec<Permutation> = cl.automorphisms().into_iter().filter(|p| !p.is_identity()).collect();
            if auts.is_empty() {
                return None;
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = auts[rng.gen_range(0..auts.len())].clone();
            Some(SymmetryGroup::generate(n, vec![g], usize::MAX).expect("uncapped"))
        }
    }
}

/// A site in the search, with its label.
#[derive(Clone, Debug)]
pub struct SiteCase {
    pub label: String,
    pub site: Arc<Site>,
}

/// Sites in canonical order: by n, then family, then group mode. Group
/// modes yielding a group already listed for the family are dropped.
pub fn enumerate_sites(params: &SearchParams) -> Result<Vec<SiteCase>, SearchError> {
    params.validate()?;
    let mut modes = params.group_modes.clone();
    modes.sort();
    modes.dedup();
    let mut out = Vec::new();
    for n in params.n_min..=params.n_max {
        let families: Vec<(String, Vec<Subset>)> = if params.exhaustive(n) {
            moore_families(n)
                .into_iter()
                .enumerate()
                .map(|(i, f)| (format!("n{n}/moore{i}"), f))
                .collect()
        } else {
            (0..params.random_sites)
                .map(|i| {
                    let f = random_moore_family(n, derive_seed(params.seed, &[1, n as u64, i as u64]));
                    (format!("n{n}/rand{i}"), f)
                })
                .collect()
        };
        for (fi, (label, family)) in families.into_iter().enumerate() {
            let base = Site::new(n, &family, vec![]).expect("intersection closed");
            let mut groups: Vec<Vec<Permutation>> = Vec::new();
            for &mode in &modes {
                let seed = derive_seed(params.seed, &[2, n as u64, fi as u64]);
                let Some(group) = group_for(base.cl(), mode, seed) else {
                    continue;
                };
                let mut elems = group.elements().to_vec();
                elems.sort();
                if groups.contains(&elems) {
                    continue;
                }
                groups.push(elems);
                let tag = match mode {
                    GroupMode::Trivial => "trivial",
                    GroupMode::Automorphisms => "aut",
                    GroupMode::Sampled => "sampled",
                };
                out.push(SiteCase {
                    label: format!("{label}/{tag}"),
                    site: Arc::new(base.with_group(group)),
                });
            }
        }
    }
    Ok(out)
}

/// Relations checked on one site: seeded samples, then (if curated) the
/// builtins and operator images and Horn interiors of each sample.
pub fn population(site: &Arc<Site>, params: &SearchParams, site_index: usize) -> Vec<TernaryRelation> {
    use AxiomId::*;
    let samples: Vec<TernaryRelation> = (0..params.samples)
        .map(|i| {
            let density = params.densities[i % params.densities.len()];
            let seed = derive_seed(params.seed, &[3, site_index as u64, i as u64]);
            random_invariant_relation(site, seed, density).expect("n within extensional cap")
        })
        .collect();
    let mut out = samples.clone();
    if !params.curated {
        return out;
    }
    out.push(builtin_full(site));
    out.push(builtin_a_indep(site));
    let rules = [Nor(Side::Left), Nor(Side::Right), Mon(Side::Left), Mon(Side::Right)];
    for r in &samples {
        out.push(monotonise_naive(r));
        out.push(monotonise(r));
        out.push(closure_extension(r));
        out.push(star(r));
        out.push(horn_interior(r, &rules).expect("extensional"));
        out.push(horn_interior(r, &[Nor(Side::Right), Mon(Side::Right), Bmon]).expect("extensional"));
    }
    out
}

/// Replayable record of one refutation.
#[derive(Clone, Debug, Serialize)]
pub struct WitnessBundle {
    pub claim: String,
    pub external_proof: bool,
    pub site_label: String,
    pub site: RawSite,
    pub relation: RelationFile,
    pub clause: usize,
    pub conclusion: String,
    pub relations: Vec<String>,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ClaimTally {
    pub claim: String,
    pub external_proof: bool,
    pub instances: usize,
    pub confirmed: usize,
    pub refuted: usize,
    pub skipped: usize,
    pub checks: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchReport {
    pub params: SearchParams,
    pub sites: usize,
    pub relations: usize,
    pub tallies: Vec<ClaimTally>,
    pub bundles: Vec<WitnessBundle>,
}

impl SearchReport {
    pub fn refutations(&self) -> usize {
        self.tallies.iter().map(|t| t.refuted).sum()
    }

    pub fn tally(&self, claim: &str) -> Option<&ClaimTally> {
        self.tallies.iter().find(|t| t.claim == claim)
    }

    pub fn render_text(&self) -> String {
        let p = &self.params;
        let mut s = String::new();
        let densities: Vec<String> = p.densities.iter().map(|d| d.to_string()).collect();
        let _ = writeln!(
            s,
            "search n={}..{} closures={:?} groups={:?} samples={} densities={} seed={}",
            p.n_min,
            p.n_max,
            p.closure_mode,
            p.group_modes,
            p.samples,
            densities.join(","),
            p.seed
        );
        let _ = writeln!(s, "sites={} relations={}", self.sites, self.relations);
        for t in &self.tallies {
            let _ = writeln!(
                s,
                "{:<4} instances={} confirmed={} refuted={} skipped={} checks={}{}",
                t.claim,
                t.instances,
                t.confirmed,
                t.refuted,
                t.skipped,
                t.checks,
                if t.external_proof { " [external-proof]" } else { "" }
            );
        }
        for b in &self.bundles {
            let finding = if b.external_proof {
                " (external-proof finding)"
            } else {
                ""
            };
            let _ = writeln!(
                s,
                "refuted {} on {} relation {}: clause {} {} [{}] {}{finding}",
                b.claim,
                b.site_label,
                b.relation.name,
                b.clause,
                b.conclusion,
                b.relations.join(", "),
                b.verdict
            );
        }
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }
}

struct SiteOutcome {
    relations: usize,
    tallies: Vec<ClaimTally>,
    bundles: Vec<WitnessBundle>,
}

fn run_site(case: &SiteCase, index: usize, claims: &[Claim], params: &SearchParams) -> SiteOutcome {
    let pop = population(&case.site, params, index);
    let mut tallies: Vec<ClaimTally> = claims
        .iter()
        .map(|c| ClaimTally {
            claim: c.id.to_string(),
            external_proof: c.external_proof,
            ..Default::default()
        })
        .collect();
    let mut bundles = Vec::new();
    // claims about a-indep ignore the input, so check them once per site
    let (fixed, varying): (Vec<usize>, Vec<usize>) =
        (0..claims.len()).partition(|&i| claims[i].subject == Subject::AIndep);
    let varying_claims: Vec<Claim> = varying.iter().map(|&i| claims[i].clone()).collect();
    let fixed_claims: Vec<Claim> = fixed.iter().map(|&i| claims[i].clone()).collect();
    let mut runs: Vec<(&TernaryRelation, &[usize], &[Claim])> = pop
        .iter()
        .map(|r| (r, varying.as_slice(), varying_claims.as_slice()))
        .collect();
    let a_indep = builtin_a_indep(&case.site);
    if !fixed.is_empty() {
        runs.push((&a_indep, fixed.as_slice(), fixed_claims.as_slice()));
    }
    for (r, slots, subset) in runs {
        if subset.is_empty() {
            continue;
        }
        for (&slot, v) in slots.iter().zip(verify_claims(subset, r)) {
            let t = &mut tallies[slot];
            t.instances += 1;
            t.checks += v.instances_checked;
            match v.status {
                ClaimStatus::Confirmed => t.confirmed += 1,
                ClaimStatus::Skipped { .. } => t.skipped += 1,
                ClaimStatus::Refuted(refutation) => {
                    t.refuted += 1;
                    let subject = match claims[slot].subject {
                        Subject::Input => r.clone(),
                        Subject::AIndep => builtin_a_indep(&case.site),
                    };
                    bundles.push(WitnessBundle {
                        claim: v.claim,
                        external_proof: claims[slot].external_proof,
                        site_label: case.label.clone(),
                        site: case.site.to_raw(),
                        relation: subject.to_file(false, Some("site.json")).expect("extensional"),
                        clause: refutation.clause,
                        conclusion: refutation.conclusion,
                        relations: refutation.relations,
                        verdict: refutation.verdict,
                    });
                }
            }
        }
    }
    SiteOutcome {
        relations: pop.len(),
        tallies,
        bundles,
    }
}

/// Runs `claims` over every site and relation described by `params`.
/// The report is identical for any `jobs`.
pub fn search(claims: &[Claim], params: &SearchParams) -> Result<SearchReport, SearchError> {
    let sites = enumerate_sites(params)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(params.jobs.max(1))
        .build()
        .map_err(|e| SearchError::Pool(e.to_string()))?;
    let outcomes: Vec<SiteOutcome> = pool.install(|| {
        sites
            .par_iter()
            .enumerate()
            .map(|(i, case)| run_site(case, i, claims, params))
            .collect()
    });
    let mut tallies: Vec<ClaimTally> = claims
        .iter()
        .map(|c| ClaimTally {
            claim: c.id.to_string(),
            external_proof: c.external_proof,
            ..Default::default()
        })
        .collect();
    let mut bundles = Vec::new();
    let mut relations = 0;
    for o in outcomes {
        relations += o.relations;
        for (acc, t) in tallies.iter_mut().zip(o.tallies) {
            acc.instances += t.instances;
            acc.confirmed += t.confirmed;
            acc.refuted += t.refuted;
            acc.skipped += t.skipped;
            acc.checks += t.checks;
        }
        bundles.extend(o.bundles);
    }
    bundles.truncate(params.max_bundles);
    Ok(SearchReport {
        params: params.clone(),
        sites: sites.len(),
        relations,
        tallies,
        bundles,
    })
}
