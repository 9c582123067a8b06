//! JSON and CSV renderings of core results.

use num_rational::BigRational;
use serde_json::{json, Value};
use sqfree_core::residue::RhoTable;
use sqfree_core::sieve::{DensityRow, SieveReport};
use sqfree_core::singular::{round_down, round_up, SingularSeriesResult};
use sqfree_core::FieldSpec;

/// Bumped on any incompatible change to the JSON layout.
pub const SCHEMA_VERSION: u32 = 1;

/// Counts beyond `u64` are emitted as decimal strings.
pub fn num(n: u128) -> Value {
    u64::try_from(n).map(Value::from).unwrap_or_else(|_| Value::String(n.to_string()))
}

pub fn signed(n: i128) -> Value {
    i64::try_from(n).map(Value::from).unwrap_or_else(|_| Value::String(n.to_string()))
}

/// Exact rational as `"a/b"` (or `"a"` for integers).
pub fn rational(x: &BigRational) -> Value {
    Value::String(x.to_string())
}

pub fn field(f: &FieldSpec) -> Value {
    let modulus = f.modulus().map(|m| {
        let base = FieldSpec::prime(f.p()).expect("characteristic is prime");
        sqfree_core::FqPoly::from_ints(&base, m).render("u")
    });
    json!({ "p": f.p(), "e": f.e(), "q": f.q(), "modulus": modulus })
}

pub fn envelope(command: &str, field: Option<&FieldSpec>, seed: u64, input: Value, result: Value) -> Value {
    json!({
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "field": field.map(self::field),
        "seed": seed,
        "input": input,
        "result": result,
    })
}

pub fn rho_table(t: &RhoTable) -> Value {
    json!({
        "prime": t.prime.to_string(),
        "degree": t.prime.degree(),
        "rho_p": num(t.rho_p),
        "rho_p2": num(t.rho_p2),
        "method": t.method.as_str(),
    })
}

pub fn enclosure(e: &SingularSeriesResult) -> Value {
    json!({
        "m0": e.m0,
        "c_lo": rational(&e.c_lo),
        "c_hi": rational(&e.c_hi),
        "c_lo_f64": e.c_lo_f64(),
        "c_hi_f64": e.c_hi_f64(),
        "partial_product": rational(&e.partial_product),
        "partial_sum": rational(&e.partial_sum),
        "tail_bound": rational(&e.tail_bound),
        "obstruction": e.obstruction.as_ref().map(|p| p.to_string()),
        "r": e.r.as_ref().map(|r| r.to_string()),
        "per_prime": e.per_prime.iter().map(rho_table).collect::<Vec<_>>(),
    })
}

pub fn sieve_report(r: &SieveReport) -> Value {
    let c = &r.counts;
    let b = &r.brun;
    json!({
        "kind": r.kind,
        "f": r.f.to_string(),
        "params": {
            "m": r.params.m,
            "m0": r.params.m0,
            "m1": r.params.m1,
            "mp": r.params.mp,
            "r": r.params.r,
        },
        "counts": {
            "total": num(c.total),
            "squarefree": num(c.n),
            "n_prime": num(c.n_prime),
            "n_dprime": num(c.n_dprime),
            "n_tprime": num(c.n_tprime),
            "hist": c.hist.iter().map(|&h| num(h)).collect::<Vec<_>>(),
        },
        "density": rational(&r.density()),
        "brun": {
            "n_k_scan": b.n_k_scan.iter().map(|&n| num(n)).collect::<Vec<_>>(),
            "n_k_formula": b.n_k_formula.iter().map(|n| n.map(num)).collect::<Vec<_>>(),
            "partial_sums": b.partial_sums.iter().map(|&n| signed(n)).collect::<Vec<_>>(),
            "v": b.v.iter().map(rational).collect::<Vec<_>>(),
            "u": rational(&b.u),
        },
        "enclosure": r.enclosure.as_ref().map(enclosure),
        "checks": r.checks.iter().map(|c| json!({ "name": c.name, "passed": c.passed })).collect::<Vec<_>>(),
        "all_passed": r.all_passed(),
    })
}

pub fn density_row(row: &DensityRow) -> Value {
    json!({
        "m": row.m,
        "deg_n": row.n,
        "count": num(row.count),
        "total": num(row.total),
        "density": rational(&row.density()),
        "c_lo": rational(&row.c_lo),
        "c_hi": rational(&row.c_hi),
    })
}

pub const DENSITY_CSV_HEADER: &str = "m,deg_n,count,total,density,c_lo,c_hi";

pub fn density_csv(row: &DensityRow) -> String {
    format!(
        "{},{},{},{},{},{},{}",
        row.m,
        row.n.map(|n| n.to_string()).unwrap_or_default(),
        row.count,
        row.total,
        row.count as f64 / row.total as f64,
        round_down(&row.c_lo),
        round_up(&row.c_hi),
    )
}

pub const SIEVE_CSV_HEADER: &str =
    "kind,m,m0,k,total,squarefree,n_prime,n_dprime,n_tprime,n_k_scan,n_k_formula,partial_sum,v_k";

/// One row per `k = 0..=r`, repeating the scan totals.
pub fn sieve_csv(r: &SieveReport) -> Vec<String> {
    let c = &r.counts;
    let b = &r.brun;
    (0..=r.params.r)
        .map(|k| {
            format!(
                "{},{},{},{},{},{},{},{},{},{},{},{},{}",
                r.kind,
                r.params.m,
                r.params.m0,
                k,
                c.total,
                c.n,
                c.n_prime,
                c.n_dprime,
                c.n_tprime,
                b.n_k_scan[k],
                b.n_k_formula[k].map(|n| n.to_string()).unwrap_or_default(),
                b.partial_sums[k],
                b.v[k],
            )
        })
        .collect()
}

pub const RHO_CSV_HEADER: &str = "prime,degree,rho_p,rho_p2,method";

pub fn rho_csv(t: &RhoTable) -> String {
    format!(
        "{},{},{},{},{}",
        t.prime,
        t.prime.degree(),
        t.rho_p,
        t.rho_p2,
        t.method.as_str()
    )
}
