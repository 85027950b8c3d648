use serde::{Deserialize, Serialize};

use super::MaskConfig;
use crate::error::{Error, Result};
use crate::numerics::Interval;
use crate::transport::{Frame, Role, Tag};

/// Shape of one S2PM call and which data holder holds the left operand.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TripleSpec {
    pub n: usize,
    pub s: usize,
    pub m: usize,
    pub left: Role,
}

/// Ordered list of S2PM calls a session will make. Parties consume triples
/// in exactly this order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Plan {
    specs: Vec<TripleSpec>,
}

impl Plan {
    pub fn new() -> Self {
        Plan::default()
    }

    pub fn specs(&self) -> &[TripleSpec] {
        &self.specs
    }

    pub fn len(&self) -> usize {
        self.specs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.specs.is_empty()
    }

    pub fn push(&mut self, spec: TripleSpec) {
        self.specs.push(spec);
    }

    pub fn then(mut self, other: Plan) -> Plan {
        self.specs.extend(other.specs);
        self
    }

    pub fn repeat(&self, times: usize) -> Plan {
        Plan {
            specs: (0..times).flat_map(|_| self.specs.iter().copied()).collect(),
        }
    }

    pub fn s2pm(n: usize, s: usize, m: usize, left: Role) -> Plan {
        Plan {
            specs: vec![TripleSpec { n, s, m, left }],
        }
    }

    /// Local products plus A1×B2 (Alice left) and B1×A2 (Bob left).
    pub fn s2phm(n: usize, s: usize, m: usize) -> Plan {
        Plan::s2pm(n, s, m, Role::Alice).then(Plan::s2pm(n, s, m, Role::Bob))
    }

    pub fn s2php(n: usize, rho: usize) -> Plan {
        Plan::s2pm(n, rho * rho, n, Role::Alice)
    }

    pub fn s2patp(n: usize, rho: usize) -> Plan {
        Plan::s2php(n, rho)
    }

    pub fn s2pr(n: usize, rho: usize) -> Plan {
        Plan::s2patp(n, rho).then(Plan::s2php(n, rho))
    }

    pub fn s2ps(n: usize, rho: usize) -> Plan {
        Plan::s2php(n, rho).then(Plan::s2pr(n, rho))
    }

    /// Runs of identical consecutive specs.
    fn runs(&self) -> Vec<(TripleSpec, u32)> {
        let mut out: Vec<(TripleSpec, u32)> = Vec::new();
        for s in &self.specs {
            match out.last_mut() {
                Some((last, count)) if last == s => *count += 1,
                _ => out.push((*s, 1)),
            }
        }
        out
    }
}

/// Upper bound on triples per request; protects the CS from absurd requests.
pub const MAX_REQUEST_TRIPLES: usize = 1 << 24;

/// Everything the CS learns about a session: shapes, mask range, batching.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PreprocessRequest {
    pub batched: bool,
    pub mask: MaskConfig,
    pub plan: Plan,
}

fn role_code(r: Role) -> Result<u8> {
    match r {
        Role::Alice => Ok(1),
        Role::Bob => Ok(2),
        other => Err(Error::invalid(format!("left operand holder must be alice or bob, got {other}"))),
    }
}

impl PreprocessRequest {
    pub fn to_frame(&self) -> Result<Frame> {
        let mut p = Vec::new();
        p.push(u8::from(self.batched));
        p.extend_from_slice(&self.mask.range.lo.to_le_bytes());
        p.extend_from_slice(&self.mask.range.hi.to_le_bytes());
        p.extend_from_slice(&self.mask.theta.to_le_bytes());
        let runs = self.plan.runs();
        p.extend_from_slice(&(runs.len() as u32).to_le_bytes());
        for (spec, count) in runs {
            for d in [spec.n, spec.s, spec.m] {
                let d = u32::try_from(d).map_err(|_| Error::invalid("dimension exceeds u32"))?;
                p.extend_from_slice(&d.to_le_bytes());
            }
            p.push(role_code(spec.left)?);
            p.extend_from_slice(&count.to_le_bytes());
        }
        Ok(Frame::new(Tag::PreprocessRequest, p))
    }

    pub fn from_frame(frame: &Frame) -> Result<Self> {
        if frame.tag != Tag::PreprocessRequest {
            return Err(Error::UnexpectedFrame {
                expected: "PreprocessRequest".into(),
                got: format!("{:?}", frame.tag),
            });
        }
        let mut r = Reader(&frame.payload);
        let batched = match r.u8()? {
            0 => false,
            1 => true,
            b => return Err(Error::Malformed(format!("batched flag {b}"))),
        };
        let (lo, hi, theta) = (r.f64()?, r.f64()?, r.f64()?);
        let mask = MaskConfig::new(Interval::new(lo, hi)?, theta)?;
        let nruns = r.u32()?;
        let mut plan = Plan::new();
        for _ in 0..nruns {
            let (n, s, m) = (r.u32()? as usize, r.u32()? as usize, r.u32()? as usize);
            let left = match r.u8()? {
                1 => Role::Alice,
                2 => Role::Bob,
                b => return Err(Error::Malformed(format!("left role code {b}"))),
            };
            let count = r.u32()? as usize;
            if n == 0 || m == 0 || s < 2 {
                return Err(Error::Malformed(format!("triple shape {n}x{s}x{m}")));
            }
            if plan.len() + count > MAX_REQUEST_TRIPLES {
                return Err(Error::Malformed("too many triples requested".into()));
            }
            for _ in 0..count {
                plan.push(TripleSpec { n, s, m, left });
            }
        }
        if !r.0.is_empty() {
            return Err(Error::Malformed("trailing bytes in request".into()));
        }
        Ok(PreprocessRequest { batched, mask, plan })
    }
}

struct Reader<'a>(&'a [u8]);

impl Reader<'_> {
    fn take(&mut self, k: usize) -> Result<&[u8]> {
        if self.0.len() < k {
            return Err(Error::Truncated { needed: k, got: self.0.len() });
        }
        let (head, tail) = self.0.split_at(k);
        self.0 = tail;
        Ok(head)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn composite_plans_have_expected_depth() {
        assert_eq!(Plan::s2php(5, 2).len(), 1);
        assert_eq!(Plan::s2pr(5, 2).len(), 2);
        assert_eq!(Plan::s2ps(5, 2).len(), 3);
        assert_eq!(Plan::s2phm(3, 4, 1).specs()[1].left, Role::Bob);
    }

    #[test]
    fn request_roundtrip_compresses_runs() {
        let plan = Plan::s2ps(7, 2).then(Plan::s2phm(3, 4, 1)).repeat(3);
        let req = PreprocessRequest {
            batched: false,
            mask: MaskConfig::default(),
            plan,
        };
        let f = req.to_frame().unwrap();
        assert_eq!(PreprocessRequest::from_frame(&f).unwrap(), req);
    }
}
