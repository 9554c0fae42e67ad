//! Retrieval quality metrics: recall, precision, effectiveness, the bull's
//! eye score, and recall-precision curves.

use crate::descriptor::Descriptor;
use crate::error::{Error, Result};
use crate::retrieval::{rank, DescriptorDatabase, RankedResult};

/// Per-query contingency counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvalCounts {
    /// Relevant items retrieved.
    pub relevant_retrieved: usize,
    /// Relevant items not retrieved.
    pub relevant_missed: usize,
    /// Irrelevant items retrieved.
    pub irrelevant_retrieved: usize,
    /// Total relevant items in the database.
    pub total_relevant: usize,
    /// Number of results the user asked for.
    pub requested: usize,
}

impl EvalCounts {
    /// Builds counts from a ranking prefix; keeps `retrieved = A + C` and
    /// `A + B = N` consistent by construction.
    pub fn new(
        relevant_retrieved: usize,
        retrieved: usize,
        total_relevant: usize,
        requested: usize,
    ) -> Self {
        assert!(relevant_retrieved <= retrieved && relevant_retrieved <= total_relevant);
        Self {
            relevant_retrieved,
            relevant_missed: total_relevant - relevant_retrieved,
            irrelevant_retrieved: retrieved - relevant_retrieved,
            total_relevant,
            requested,
        }
    }
}

/// Fraction of the database's relevant items that were retrieved.
pub fn recall(c: &EvalCounts) -> Result<f64> {
    if c.total_relevant == 0 {
        return Err(Error::NoRelevantInDb);
    }
    Ok(c.relevant_retrieved as f64 / c.total_relevant as f64)
}

/// Fraction of the retrieved items that are relevant.
pub fn precision(c: &EvalCounts) -> Result<f64> {
    let retrieved = c.relevant_retrieved + c.irrelevant_retrieved;
    if retrieved == 0 {
        return Err(Error::EmptyResultSet);
    }
    Ok(c.relevant_retrieved as f64 / retrieved as f64)
}

/// Retrieval score against the user's requested count `T`:
/// `A / N` when more results were requested than exist, `A / T` otherwise.
pub fn effectiveness(c: &EvalCounts) -> Result<f64> {
    let (a, n, t) = (c.relevant_retrieved as f64, c.total_relevant, c.requested);
    if t > n {
        if n == 0 {
            return Err(Error::NoRelevantInDb);
        }
        Ok(a / n as f64)
    } else {
        if t == 0 {
            return Err(Error::UndefinedBranch);
        }
        Ok(a / t as f64)
    }
}

/// A labeled query descriptor.
#[derive(Debug, Clone)]
pub struct LabeledQuery {
    pub id: String,
    pub label: String,
    pub descriptor: Descriptor,
}

/// Bull's eye score as a percentage: for each query with `N` same-class
/// database members, the fraction of those members found in the top `2N`
/// results, averaged over queries.
///
/// A query present in the database counts as its own match. Fails with
/// `UnknownLabel` when a query's class has no database members.
pub fn bulls_eye(db: &DescriptorDatabase, queries: &[LabeledQuery]) -> Result<f64> {
    assert!(!queries.is_empty(), "bull's eye needs at least one query");
    let mut total = 0.0;
    for q in queries {
        let n = db.label_count(&q.label);
        if n == 0 {
            return Err(Error::UnknownLabel(q.label.clone()));
        }
        let results = rank(&q.descriptor, db, 2 * n)?;
        let hits = results.iter().filter(|r| r.label == q.label).count();
        total += hits as f64 / n as f64;
    }
    Ok(100.0 * total / queries.len() as f64)
}

/// One `(recall, precision)` point after every rank position.
pub fn pr_curve(ranking: &[RankedResult], relevant_ids: &[&str]) -> Vec<(f64, f64)> {
    assert!(
        !relevant_ids.is_empty(),
        "precision-recall needs relevant items"
    );
    let n = relevant_ids.len() as f64;
    let mut hits = 0usize;
    ranking
        .iter()
        .enumerate()
        .map(|(i, r)| {
            if relevant_ids.contains(&r.id.as_str()) {
                hits += 1;
            }
            (hits as f64 / n, hits as f64 / (i + 1) as f64)
        })
        .collect()
}

/// Precision interpolated at the 11 standard recall levels 0.0, 0.1, .., 1.0:
/// at each level, the maximum precision among points with recall at or above
/// it (0 when none).
pub fn interpolate_eleven_points(curve: &[(f64, f64)]) -> [f64; 11] {
    let mut out = [0.0f64; 11];
    for (i, slot) in out.iter_mut().enumerate() {
        let level = i as f64 / 10.0;
        *slot = curve
            .iter()
            .filter(|(r, _)| *r >= level - 1e-12)
            .map(|(_, p)| *p)
            .fold(0.0, f64::max);
    }
    out
}

/// Everything measured for one query.
#[derive(Debug, Clone)]
pub struct QueryEval {
    pub id: String,
    pub label: String,
    pub counts: EvalCounts,
    pub recall: f64,
    pub precision: f64,
    pub effectiveness: f64,
}

/// Aggregate evaluation of a query set against one database.
#[derive(Debug, Clone)]
pub struct EvalReport {
    pub per_query: Vec<QueryEval>,
    /// Mean interpolated precision at the 11 standard recall levels.
    pub mean_pr: [(f64, f64); 11],
    /// Bull's eye score in `[0, 100]`.
    pub bep_percent: f64,
}

/// Runs every query against the database: contingency counts at the
/// requested cut `top_k`, precision-recall over the full ranking, and the
/// bull's eye aggregate.
pub fn evaluate(
    db: &DescriptorDatabase,
    queries: &[LabeledQuery],
    top_k: usize,
) -> Result<EvalReport> {
    let mut per_query = Vec::with_capacity(queries.len());
    let mut pr_sums = [0.0f64; 11];
    for q in queries {
        let n = db.label_count(&q.label);
        if n == 0 {
            return Err(Error::UnknownLabel(q.label.clone()));
        }
        let full = rank(&q.descriptor, db, db.len())?;
        let relevant: Vec<&str> = db
            .records()
            .iter()
            .filter(|r| r.label == q.label)
            .map(|r| r.id.as_str())
            .collect();

        let cut = top_k.min(full.len());
        let hits_at_cut = full[..cut]
            .iter()
            .filter(|r| relevant.contains(&r.id.as_str()))
            .count();
        let counts = EvalCounts::new(hits_at_cut, cut, n, top_k);

        let curve = pr_curve(&full, &relevant);
        for (i, p) in interpolate_eleven_points(&curve).iter().enumerate() {
            pr_sums[i] += p;
        }

        per_query.push(QueryEval {
            id: q.id.clone(),
            label: q.label.clone(),
            counts,
            recall: recall(&counts)?,
            precision: precision(&counts).unwrap_or(0.0),
            effectiveness: effectiveness(&counts)?,
        });
    }

    let m = per_query.len() as f64;
    let mut mean_pr = [(0.0, 0.0); 11];
    for (i, slot) in mean_pr.iter_mut().enumerate() {
        *slot = (i as f64 / 10.0, pr_sums[i] / m);
    }
    Ok(EvalReport {
        per_query,
        mean_pr,
        bep_percent: bulls_eye(db, queries)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::descriptor::DescriptorMode;
    use crate::retrieval::DescriptorRecord;

    fn desc(values: Vec<f64>) -> Descriptor {
        Descriptor {
            mode: DescriptorMode::Dhfp,
            values,
            bandwidth: None,
        }
    }

    fn db_with(records: &[(&str, &str, Vec<f64>)]) -> DescriptorDatabase {
        let dim = records[0].2.len();
        let mut db = DescriptorDatabase::new(dim + 1, DescriptorMode::Dhfp);
        for (id, label, v) in records {
            db.push(DescriptorRecord {
                id: id.to_string(),
                label: label.to_string(),
                descriptor: desc(v.clone()),
            })
            .unwrap();
        }
        db
    }

    #[test]
    fn recall_examples() {
        assert_eq!(recall(&EvalCounts::new(9, 10, 10, 10)).unwrap(), 0.9);
        assert_eq!(recall(&EvalCounts::new(0, 10, 10, 10)).unwrap(), 0.0);
        assert_eq!(recall(&EvalCounts::new(10, 12, 10, 12)).unwrap(), 1.0);
        assert_eq!(
            recall(&EvalCounts::new(0, 3, 0, 3)),
            Err(Error::NoRelevantInDb)
        );
    }

    #[test]
    fn precision_examples() {
        // 9 relevant of 10 retrieved, and 6 of 10.
        assert_eq!(precision(&EvalCounts::new(9, 10, 20, 10)).unwrap(), 0.9);
        assert_eq!(precision(&EvalCounts::new(6, 10, 20, 10)).unwrap(), 0.6);
        assert_eq!(precision(&EvalCounts::new(4, 4, 9, 4)).unwrap(), 1.0);
        assert_eq!(
            precision(&EvalCounts::new(0, 0, 5, 0)),
            Err(Error::EmptyResultSet)
        );
    }

    #[test]
    fn effectiveness_branches() {
        // T > N: A / N.
        assert_eq!(effectiveness(&EvalCounts::new(7, 20, 10, 20)).unwrap(), 0.7);
        // T <= N: A / T.
        assert_eq!(effectiveness(&EvalCounts::new(7, 10, 15, 10)).unwrap(), 0.7);
        assert_eq!(effectiveness(&EvalCounts::new(0, 10, 15, 10)).unwrap(), 0.0);
        assert_eq!(effectiveness(&EvalCounts::new(0, 20, 10, 20)).unwrap(), 0.0);
        assert_eq!(
            effectiveness(&EvalCounts::new(0, 0, 5, 0)),
            Err(Error::UndefinedBranch)
        );
    }

    #[test]
    fn perfect_single_class_bep_is_100() {
        let records: Vec<(String, &str, Vec<f64>)> = (0..10)
            .map(|i| (format!("r{i}"), "only", vec![1.0, 0.5 + 0.01 * i as f64]))
            .collect();
        let borrowed: Vec<(&str, &str, Vec<f64>)> = records
            .iter()
            .map(|(id, l, v)| (id.as_str(), *l, v.clone()))
            .collect();
        let db = db_with(&borrowed);
        let queries: Vec<LabeledQuery> = db
            .records()
            .iter()
            .map(|r| LabeledQuery {
                id: r.id.clone(),
                label: r.label.clone(),
                descriptor: r.descriptor.clone(),
            })
            .collect();
        assert_eq!(bulls_eye(&db, &queries).unwrap(), 100.0);
    }

    #[test]
    fn two_by_two_database_bep_is_100_even_with_intrusion() {
        // With 2 classes x 2 items the top-2N window covers the whole
        // database, so the cross-class intrusion at rank 2 cannot lower the
        // score: every query still finds both class members in its window.
        let db = db_with(&[
            ("a1", "a", vec![1.0, 0.0, 0.0]),
            ("a2", "a", vec![0.0, 1.0, 0.0]),
            ("b1", "b", vec![0.9, 0.1, 0.0]), // intrudes between a1 and a2
            ("b2", "b", vec![0.0, 0.0, 1.0]),
        ]);
        let q = |id: &str| {
            let r = db.records().iter().find(|r| r.id == id).unwrap();
            LabeledQuery {
                id: r.id.clone(),
                label: r.label.clone(),
                descriptor: r.descriptor.clone(),
            }
        };
        let ranking = rank(&q("a1").descriptor, &db, 4).unwrap();
        assert_eq!(ranking[1].id, "b1"); // the intrusion is real
        let queries: Vec<LabeledQuery> = ["a1", "a2", "b1", "b2"].iter().map(|id| q(id)).collect();
        assert_eq!(bulls_eye(&db, &queries).unwrap(), 100.0);
    }

    #[test]
    fn unequal_classes_hand_enumerated_bep() {
        // Class a: 2 members; class b: 4. For query a1 the top-4 window is
        // [a1, b1, b2, b3] (a2 is orthogonal, every b is closer), so a1
        // scores 1/2; symmetrically for a2. Every b query has top-8 covering
        // the whole database: 4/4. Mean = (0.5 + 0.5 + 4) / 6 = 5/6.
        let db = db_with(&[
            ("a1", "a", vec![1.0, 0.0, 0.0]),
            ("a2", "a", vec![0.0, 1.0, 0.0]),
            ("b1", "b", vec![1.0, 1.0, 0.0]),
            ("b2", "b", vec![1.0, 2.0, 0.0]),
            ("b3", "b", vec![1.0, 3.0, 0.0]),
            ("b4", "b", vec![1.0, 4.0, 0.0]),
        ]);
        let queries: Vec<LabeledQuery> = db
            .records()
            .iter()
            .map(|r| LabeledQuery {
                id: r.id.clone(),
                label: r.label.clone(),
                descriptor: r.descriptor.clone(),
            })
            .collect();
        let bep = bulls_eye(&db, &queries).unwrap();
        assert!((bep - 500.0 / 6.0).abs() < 1e-9, "bep {bep}");
    }

    #[test]
    fn member_query_counts_itself_at_rank_one() {
        let db = db_with(&[
            ("a1", "a", vec![1.0, 0.0, 0.0]),
            ("b1", "b", vec![0.5, 0.5, 0.0]),
        ]);
        let q = LabeledQuery {
            id: "a1".into(),
            label: "a".into(),
            descriptor: desc(vec![1.0, 0.0, 0.0]),
        };
        let ranking = rank(&q.descriptor, &db, 2).unwrap();
        assert_eq!(ranking[0].id, "a1");
        assert_eq!(bulls_eye(&db, &[q]).unwrap(), 100.0);
    }

    #[test]
    fn unknown_label_is_rejected() {
        let db = db_with(&[("a1", "a", vec![1.0, 0.0])]);
        let q = LabeledQuery {
            id: "q".into(),
            label: "nope".into(),
            descriptor: desc(vec![1.0, 0.0]),
        };
        assert_eq!(
            bulls_eye(&db, &[q]).unwrap_err(),
            Error::UnknownLabel("nope".into())
        );
    }

    fn ranked(ids: &[&str]) -> Vec<RankedResult> {
        ids.iter()
            .enumerate()
            .map(|(i, id)| RankedResult {
                id: id.to_string(),
                label: String::new(),
                score: 1.0 - i as f64 * 0.1,
                zero_descriptor: false,
            })
            .collect()
    }

    #[test]
    fn pr_curve_with_all_relevant_first() {
        let curve = pr_curve(&ranked(&["r1", "r2", "x1", "x2"]), &["r1", "r2"]);
        assert_eq!(
            curve,
            vec![(0.5, 1.0), (1.0, 1.0), (1.0, 2.0 / 3.0), (1.0, 0.5)]
        );
    }

    #[test]
    fn pr_curve_with_nothing_relevant_retrieved() {
        let curve = pr_curve(&ranked(&["x1", "x2"]), &["r1"]);
        assert!(curve.iter().all(|&(_, p)| p == 0.0));
    }

    #[test]
    fn pr_curve_single_relevant_item() {
        assert_eq!(pr_curve(&ranked(&["r1"]), &["r1"]), vec![(1.0, 1.0)]);
    }

    #[test]
    fn pr_recall_is_nondecreasing_and_final_recall_hits_one() {
        let curve = pr_curve(&ranked(&["x1", "r2", "x2", "r1"]), &["r1", "r2"]);
        for w in curve.windows(2) {
            assert!(w[1].0 >= w[0].0);
        }
        assert_eq!(curve.last().unwrap().0, 1.0);
    }

    #[test]
    fn eleven_point_interpolation_takes_running_maximum() {
        let curve = vec![(0.5, 1.0), (1.0, 1.0), (1.0, 2.0 / 3.0), (1.0, 0.5)];
        let interp = interpolate_eleven_points(&curve);
        for p in interp {
            assert_eq!(p, 1.0); // max precision at recall >= level is 1 everywhere
        }
    }

    #[test]
    fn evaluate_produces_consistent_report() {
        let db = db_with(&[
            ("a1", "a", vec![1.0, 0.0, 0.0]),
            ("a2", "a", vec![0.9, 0.1, 0.0]),
            ("b1", "b", vec![0.0, 1.0, 0.0]),
            ("b2", "b", vec![0.0, 0.9, 0.1]),
        ]);
        let queries: Vec<LabeledQuery> = db
            .records()
            .iter()
            .map(|r| LabeledQuery {
                id: r.id.clone(),
                label: r.label.clone(),
                descriptor: r.descriptor.clone(),
            })
            .collect();
        let report = evaluate(&db, &queries, 2).unwrap();
        assert_eq!(report.per_query.len(), 4);
        for q in &report.per_query {
            assert_eq!(q.recall, 1.0);
            assert_eq!(q.precision, 1.0);
            assert_eq!(q.effectiveness, 1.0);
        }
        assert_eq!(report.bep_percent, 100.0);
        for (r, p) in report.mean_pr {
            assert!((0.0..=1.0).contains(&r) && (0.0..=1.0).contains(&p));
        }
    }
}
