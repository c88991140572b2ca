// Licensed under the Apache License, Version 2.0 (the "License"); you may
// not use this file except in compliance with the License. You may obtain
// a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
// License for the specific language governing permissions and limitations
// under the License.

use anyhow::{anyhow, bail, Result};
use cayley_core::ball::{growth_counts, growth_counts_covering, BallTable, PhiValue};
use cayley_core::constants::{certify_at_scale, csc_to_folner, folner_to_csc, quotient_estimate, BoundParams, Scope};
use cayley_core::folner::{folner_family_upper, folner_record, FolnerRecord, FolnerRow};
use cayley_core::group::{Group, GroupHandle};
use cayley_core::isoperimetry::{boundary_ratio, check_inequality, FiniteSubset, FormName, InequalityForm};
use cayley_core::rational::{self, uint, Rational};
use cayley_core::suite::run_suite;
use cayley_core::transport::{build_ledger, verify_growth_lemma, verify_lemma, Lemma, LemmaReport};
use cayley_core::Error;
use serde::Serialize;

use crate::{input, Cli, Command, Direction, Format, Report};

fn json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn csv<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

/// Renders one flat record in the requested format.
fn single<T: Serialize>(format: Format, value: &T) -> Result<String> {
    match format {
        Format::Csv => csv(std::slice::from_ref(value)),
        Format::Json | Format::Text => json(value),
    }
}

fn ok(body: String) -> Result<Report> {
    Ok(Report { body, falsified: false })
}

pub fn run(cli: &Cli) -> Result<Report> {
    let format = cli.format.unwrap_or(match cli.command {
        Command::Suite => Format::Text,
        _ => Format::Json,
    });
    let budget = cli.memory_budget;
    let group = || input::group(cli.group.as_deref());
    match &cli.command {
        Command::Growth { radius } => growth(&group()?, *radius, budget, format),
        Command::Phi { v } => phi(&group()?, v, budget, format),
        Command::AvgLength { radius } => avg_length(&group()?, *radius, budget, format),
        Command::Boundary { omega } => {
            let g = group()?;
            boundary(&input::omega(&g, omega)?, format)
        }
        Command::Check {
            form,
            alpha,
            epsilon,
            omega,
        } => {
            let g = group()?;
            let omega = input::omega(&g, omega)?;
            check(&omega, form, alpha.clone().or_else(|| epsilon.clone()), budget, format)
        }
        Command::Transport {
            omega,
            radius,
            lemma,
            alpha,
        } => {
            let g = group()?;
            let omega = input::omega(&g, omega)?;
            transport(&omega, *radius, lemma, alpha.as_ref(), budget, format)
        }
        Command::Folner {
            n,
            n_max,
            cap,
            family_only,
        } => {
            let ns: Vec<u64> = match (n, n_max) {
                (Some(n), None) => vec![*n],
                (None, Some(m)) => (1..=*m).collect(),
                _ => bail!("give --n or --n-max"),
            };
            folner(&group()?, &ns, *cap, *family_only, budget, format)
        }
        Command::Convert {
            direction,
            c,
            alpha,
            rho,
            generating_set_size,
        } => {
            let size = match generating_set_size {
                Some(s) => *s,
                None => group()?.generators().len(),
            };
            convert(*direction, c, alpha, rho.as_ref(), size, format)
        }
        Command::Certify { c, alpha, scope } => certify(&group()?, c, alpha, scope, budget, format),
        Command::Quotient { horizon, cap } => quotient(&group()?, *horizon, *cap, budget, format),
        Command::Suite => suite(budget, format),
    }
}

#[derive(Serialize)]
struct GrowthRow {
    r: u32,
    b_r: u64,
    s_r: u64,
    length_sum_r: u64,
    avg_len_num: String,
    avg_len_den: String,
}

fn growth(g: &GroupHandle, radius: u32, budget: usize, format: Format) -> Result<Report> {
    let counts = growth_counts(g, radius, budget)?;
    let mut rows = Vec::new();
    for r in 0..=counts.max_radius() {
        let avg = counts.average_length(r)?;
        rows.push(GrowthRow {
            r,
            b_r: counts.b()[r as usize],
            s_r: counts.s()[r as usize],
            length_sum_r: counts.length_sum()[r as usize],
            avg_len_num: avg.numer().to_string(),
            avg_len_den: avg.denom().to_string(),
        });
    }
    match format {
        Format::Csv => ok(csv(&rows)?),
        Format::Json | Format::Text => {
            #[derive(Serialize)]
            struct Out<'a> {
                group: String,
                radius: u32,
                exhausted: bool,
                rows: &'a [GrowthRow],
                #[serde(skip_serializing_if = "Option::is_none")]
                growth_rate: Option<cayley_core::ball::GrowthEstimate>,
            }
            let growth_rate = (radius >= 1).then(|| counts.growth_rate_upper(radius)).transpose()?;
            ok(json(&Out {
                group: g.to_string(),
                radius,
                exhausted: counts.is_exhausted(),
                rows: &rows,
                growth_rate,
            })?)
        }
    }
}

fn phi(g: &GroupHandle, v: &Rational, budget: usize, format: Format) -> Result<Report> {
    if *v < Rational::from_integer(0.into()) {
        bail!("v must be ≥ 0");
    }
    let counts = growth_counts_covering(g, v, budget)?;
    #[derive(Serialize)]
    struct Out {
        group: String,
        v: String,
        phi: PhiValue,
    }
    ok(single(
        format,
        &Out {
            group: g.to_string(),
            v: rational::format(v),
            phi: counts.phi(v)?,
        },
    )?)
}

fn avg_length(g: &GroupHandle, radius: u32, budget: usize, format: Format) -> Result<Report> {
    let avg = growth_counts(g, radius, budget)?.average_length(radius)?;
    #[derive(Serialize)]
    struct Out {
        group: String,
        r: u32,
        average: String,
        num: String,
        den: String,
    }
    ok(single(
        format,
        &Out {
            group: g.to_string(),
            r: radius,
            average: rational::format(&avg),
            num: avg.numer().to_string(),
            den: avg.denom().to_string(),
        },
    )?)
}

fn boundary(omega: &FiniteSubset<GroupHandle>, format: Format) -> Result<Report> {
    let g = omega.group();
    let members: Vec<_> = omega.boundary_elements().iter().collect();
    match format {
        Format::Csv => {
            #[derive(Serialize)]
            struct Row {
                element: String,
                key: String,
            }
            let rows: Vec<Row> = members
                .iter()
                .map(|x| Row {
                    element: x.to_string(),
                    key: hex::encode(g.key(x)),
                })
                .collect();
            ok(csv(&rows)?)
        }
        Format::Json | Format::Text => {
            #[derive(Serialize)]
            struct Out {
                size: usize,
                boundary_size: usize,
                ratio: String,
                boundary: Vec<String>,
                boundary_keys: Vec<String>,
            }
            ok(json(&Out {
                size: omega.len(),
                boundary_size: members.len(),
                ratio: rational::format(&boundary_ratio(omega)?),
                boundary: members.iter().map(|x| x.to_string()).collect(),
                boundary_keys: members.iter().map(|x| hex::encode(g.key(x))).collect(),
            })?)
        }
    }
}

/// Largest multiple of `|Ω|` whose `Φ` the form evaluates.
fn volume_factor(form: &InequalityForm) -> Rational {
    match form {
        InequalityForm::CscOriginal | InequalityForm::PeteCorreia => uint(2),
        InequalityForm::AvgGrowth { alpha } | InequalityForm::GrowthCor { alpha } => uint(1) + alpha,
        InequalityForm::Epsilon { epsilon } => uint(1) / epsilon,
    }
}

fn check(
    omega: &FiniteSubset<GroupHandle>,
    form: &str,
    param: Option<Rational>,
    budget: usize,
    format: Format,
) -> Result<Report> {
    let name: FormName = form.parse()?;
    let form = InequalityForm::from_name(name, param)?;
    let volume = volume_factor(&form) * uint(omega.len() as u64);
    let counts = growth_counts_covering(omega.group(), &volume, budget)?;
    let report = check_inequality(omega, &counts, &form)?;
    let body = match format {
        Format::Csv => {
            #[derive(Serialize)]
            struct Row {
                form: String,
                lhs: String,
                rhs: String,
                holds: bool,
                strict: bool,
                radius_used: PhiValue,
            }
            csv(&[Row {
                form: report.form.to_string(),
                lhs: rational::format(&report.lhs),
                rhs: rational::format(&report.rhs),
                holds: report.holds,
                strict: report.strict,
                radius_used: report.radius_used,
            }])?
        }
        Format::Json | Format::Text => json(&report)?,
    };
    Ok(Report {
        body,
        falsified: !report.holds,
    })
}

fn transport(
    omega: &FiniteSubset<GroupHandle>,
    radius: Option<u32>,
    lemma: &str,
    alpha: Option<&Rational>,
    budget: usize,
    format: Format,
) -> Result<Report> {
    let g = omega.group();
    let radius = match (radius, alpha) {
        (Some(r), _) => r,
        (None, Some(a)) => {
            let volume = (uint(1) + a) * uint(omega.len() as u64);
            growth_counts_covering(g, &volume, budget)?
                .phi(&volume)?
                .finite()
                .ok_or_else(|| anyhow!("Φ[(1 + α)|Ω|] is infinite"))?
        }
        (None, None) => 1,
    };
    let lemmas: Vec<Lemma> = if lemma == "all" {
        let mut all = vec![
            Lemma::Spheres,
            Lemma::Balls,
            Lemma::Transport,
            Lemma::Counting,
            Lemma::Fiber,
        ];
        if let Some(a) = alpha {
            all.push(Lemma::RayLower { alpha: a.clone() });
            all.push(Lemma::Conclude { alpha: a.clone() });
        }
        all
    } else {
        vec![Lemma::from_name(lemma, alpha.cloned())?]
    };
    let table = BallTable::build(g, radius.max(2), budget)?;
    let ledger = build_ledger(omega, &table, radius)?;
    let results: Vec<LemmaReport> = lemmas
        .iter()
        .map(|l| {
            if l.is_growth_only() {
                verify_growth_lemma(table.counts(), l)
            } else {
                verify_lemma(&ledger, table.counts(), l)
            }
        })
        .collect::<Result<_, Error>>()?;
    let falsified = results.iter().any(|r| !r.holds);
    let summary = ledger.summary(results);
    let body = match format {
        Format::Csv => {
            #[derive(Serialize)]
            struct Row<'a> {
                omega_size: usize,
                r: u32,
                sum_rays: u64,
                sum_omega_g: u64,
                max_fiber: u64,
                lemma: &'a str,
                holds: bool,
                witness: Option<&'a str>,
            }
            let rows: Vec<Row> = summary
                .lemma_results
                .iter()
                .map(|l| Row {
                    omega_size: summary.omega_size,
                    r: summary.r,
                    sum_rays: summary.sum_rays,
                    sum_omega_g: summary.sum_omega_g,
                    max_fiber: summary.max_fiber,
                    lemma: &l.which,
                    holds: l.holds,
                    witness: l.witness.as_deref(),
                })
                .collect();
            csv(&rows)?
        }
        Format::Json | Format::Text => json(&summary)?,
    };
    Ok(Report { body, falsified })
}

fn folner(g: &GroupHandle, ns: &[u64], cap: usize, family_only: bool, budget: usize, format: Format) -> Result<Report> {
    if family_only {
        #[derive(Serialize)]
        struct FamilyRow {
            n: u64,
            family_upper: u64,
        }
        let rows = ns
            .iter()
            .map(|&n| {
                Ok(FamilyRow {
                    n,
                    family_upper: folner_family_upper(g, n)?,
                })
            })
            .collect::<Result<Vec<_>, Error>>()?;
        return ok(match format {
            Format::Csv => csv(&rows)?,
            Format::Json | Format::Text => json(&rows)?,
        });
    }
    let records: Vec<FolnerRecord<GroupHandle>> = ns
        .iter()
        .map(|&n| folner_record(g, n, cap, budget))
        .collect::<Result<_, Error>>()?;
    let rows: Vec<FolnerRow> = records.iter().map(|r| r.row()).collect();
    match format {
        Format::Csv => ok(csv(&rows)?),
        Format::Json | Format::Text => {
            #[derive(Serialize)]
            struct Out<'a> {
                group: String,
                search_cap: usize,
                rows: &'a [FolnerRow],
                witnesses: Vec<Witness>,
            }
            #[derive(Serialize)]
            struct Witness {
                n: u64,
                elements: Vec<String>,
                keys: Vec<String>,
            }
            let witnesses = records
                .iter()
                .filter_map(|r| {
                    r.witness.as_ref().map(|w| Witness {
                        n: r.n,
                        elements: w.iter().map(|x| x.to_string()).collect(),
                        keys: w.sorted_keys().iter().map(hex::encode).collect(),
                    })
                })
                .collect();
            ok(json(&Out {
                group: g.to_string(),
                search_cap: cap,
                rows: &rows,
                witnesses,
            })?)
        }
    }
}

fn convert(
    direction: Direction,
    c: &Rational,
    alpha: &Rational,
    rho: Option<&Rational>,
    generating_set_size: usize,
    format: Format,
) -> Result<Report> {
    let (input, output) = match direction {
        Direction::CscToFolner => {
            let rho = rho.ok_or_else(|| anyhow!("csc-to-folner needs --rho"))?;
            let input = BoundParams::csc(c.clone(), alpha.clone(), generating_set_size)?;
            let output = csc_to_folner(&input, rho)?;
            (input, output)
        }
        Direction::FolnerToCsc => {
            let zero = Rational::from_integer(0.into());
            let input = BoundParams::folner(
                c.clone(),
                alpha.clone(),
                rho.cloned().unwrap_or(zero),
                generating_set_size,
            )?;
            let output = folner_to_csc(&input)?;
            (input, output)
        }
    };
    match format {
        Format::Csv => ok(csv(&[output])?),
        Format::Json | Format::Text => {
            #[derive(Serialize)]
            struct Out {
                input: BoundParams,
                output: BoundParams,
                inflation: String,
            }
            ok(json(&Out {
                inflation: rational::format(&output.inflation()),
                input,
                output,
            })?)
        }
    }
}

fn parse_scope(text: &str) -> Result<Scope> {
    let (kind, value) = text
        .split_once(':')
        .ok_or_else(|| anyhow!("scope must be ball-subsets:<radius> or connected:<max size>"))?;
    match kind {
        "ball-subsets" => Ok(Scope::ExhaustiveBallSubsets { radius: value.parse()? }),
        "connected" => Ok(Scope::ConnectedUpTo {
            max_size: value.parse()?,
        }),
        _ => bail!("unknown scope kind `{kind}`"),
    }
}

fn certify(
    g: &GroupHandle,
    c: &Rational,
    alpha: &Rational,
    scope: &str,
    budget: usize,
    format: Format,
) -> Result<Report> {
    let p = BoundParams::csc(c.clone(), alpha.clone(), g.generators().len())?;
    let cert = certify_at_scale(g, &p, parse_scope(scope)?, budget)?;
    let body = match format {
        Format::Csv => {
            #[derive(Serialize)]
            struct Row {
                form: &'static str,
                c: String,
                alpha: String,
                scope: &'static str,
                sets_checked: u64,
                holds: bool,
                witness_size: Option<usize>,
                witness_keys: Option<String>,
            }
            csv(&[Row {
                form: cert.form,
                c: rational::format(c),
                alpha: rational::format(alpha),
                scope: cert.scope.kind,
                sets_checked: cert.scope.sets_checked,
                holds: cert.holds,
                witness_size: cert.witness.as_ref().map(|w| w.size),
                witness_keys: cert.witness.as_ref().map(|w| w.keys.join(" ")),
            }])?
        }
        Format::Json | Format::Text => json(&cert)?,
    };
    Ok(Report {
        body,
        falsified: !cert.holds,
    })
}

fn quotient(g: &GroupHandle, horizon: u32, cap: usize, budget: usize, format: Format) -> Result<Report> {
    if format == Format::Csv {
        bail!("quotient reports are nested; use --format json");
    }
    let counts = growth_counts(g, horizon, budget)?;
    let records = (1..=u64::from(horizon))
        .map(|n| folner_record(g, n, cap, budget))
        .collect::<Result<Vec<_>, Error>>()?;
    let body = match quotient_estimate(g, horizon, &records, &counts) {
        Ok(q) => json(&q)?,
        Err(Error::NotApplicable(reason)) => {
            #[derive(Serialize)]
            struct Out {
                status: &'static str,
                reason: String,
            }
            json(&Out {
                status: "not-applicable",
                reason,
            })?
        }
        Err(e) => return Err(e.into()),
    };
    ok(body)
}

fn suite(budget: usize, format: Format) -> Result<Report> {
    let report = run_suite(budget);
    let body = match format {
        Format::Text => format!("{report}\n"),
        Format::Json => json(&report)?,
        Format::Csv => csv(&report.criteria)?,
    };
    Ok(Report {
        body,
        falsified: !report.passed,
    })
}
