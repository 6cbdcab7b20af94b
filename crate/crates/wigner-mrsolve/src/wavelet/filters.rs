//! Orthonormal Daubechies filters (minimum phase), orders 1..=10.
//!
//! The low-pass mask is the refinement mask of the scaling function,
//! `phi(x) = sqrt(2) sum_k h[k] phi(2x - k)`, supported on `[0, 2N-1]`.
//! The high-pass mask is the quadrature mirror `g[k] = (-1)^k h[2N-1-k]`.

use crate::error::{Result, WignerError};

/// Daubechies low-pass refinement masks, index `N-1` for order `N`.
/// Values from spectral factorization of the Daubechies half-band
/// polynomial, minimum-phase root selection, 18 significant digits.
const DAUBECHIES_LOW_PASS: [&[f64]; 10] = [
    // Daubechies-1
    &[
        0.707106781186547524,
        0.707106781186547524,
    ],
    // Daubechies-2
    &[
        0.482962913144534143,
        0.836516303737807906,
        0.224143868042013381,
        -0.129409522551260381,
    ],
    // Daubechies-3
    &[
        0.332670552950082616,
        0.806891509311092576,
        0.459877502118491570,
        -0.135011020010254589,
        -0.0854412738820266617,
        0.0352262918857095366,
    ],
    // Daubechies-4
    &[
        0.230377813308896501,
        0.714846570552915647,
        0.630880767929858908,
        -0.0279837694168598542,
        -0.187034811719093084,
        0.0308413818355607636,
        0.0328830116668851997,
        -0.0105974017850690321,
    ],
    // Daubechies-5
    &[
        0.160102397974192914,
        0.603829269797189671,
        0.724308528437772928,
        0.138428145901320732,
        -0.242294887066382032,
        -0.0322448695846383746,
        0.0775714938400457135,
        -0.00624149021279827427,
        -0.0125807519990819995,
        0.00333572528547377128,
    ],
    // Daubechies-6
    &[
        0.111540743350109464,
        0.494623890398453086,
        0.751133908021095351,
        0.315250351709197629,
        -0.226264693965439820,
        -0.129766867567261936,
        0.0975016055873230491,
        0.0275228655303057286,
        -0.0315820393174860296,
        0.000553842201161496139,
        0.00477725751094551064,
        -0.00107730108530847956,
    ],
    // Daubechies-7
    &[
        0.0778520540850091790,
        0.396539319481917307,
        0.729132090846235120,
        0.469782287405193122,
        -0.143906003928564975,
        -0.224036184993874983,
        0.0713092192668302648,
        0.0806126091510830719,
        -0.0380299369350144136,
        -0.0165745416306668807,
        0.0125509985560998406,
        0.000429577972921366521,
        -0.00180164070404749092,
        0.000353713799974520248,
    ],
    // Daubechies-8
    &[
        0.0544158422431040100,
        0.312871590914299971,
        0.675630736297289807,
        0.585354683654206713,
        -0.0158291052563493057,
        -0.284015542961546927,
        0.000472484573913282770,
        0.128747426620478459,
        -0.0173693010018075462,
        -0.0440882539307947515,
        0.0139810279173982816,
        0.00874609404740577672,
        -0.00487035299345157431,
        -0.000391740373376947046,
        0.000675449406450569366,
        -0.000117476784124769534,
    ],
    // Daubechies-9
    &[
        0.0380779473638783466,
        0.243834674612590354,
        0.604823123690111112,
        0.657288078051300538,
        0.133197385825007576,
        -0.293273783279174909,
        -0.0968407832229764605,
        0.148540749338106380,
        0.0307256814793333792,
        -0.0676328290613299737,
        0.000250947114831451958,
        0.0223616621236790972,
        -0.00472320475775139728,
        -0.00428150368246342983,
        0.00184764688305622648,
        0.000230385763523195967,
        -0.000251963188942710137,
        0.0000393473203162715995,
    ],
    // Daubechies-10
    &[
        0.0266700579005555536,
        0.188176800077691489,
        0.527201188931725586,
        0.688459039453603566,
        0.281172343660577461,
        -0.249846424327315379,
        -0.195946274377377044,
        0.127369340335793260,
        0.0930573646035723512,
        -0.0713941471663970871,
        -0.0294575368218758129,
        0.0332126740593410017,
        0.00360655356695616966,
        -0.0107331754833305750,
        0.00139535174705290117,
        0.00199240529518505612,
        -0.000685856694959711627,
        -0.000116466855129285451,
        0.0000935886703200695913,
        -0.0000132642028945212448,
    ],
];

/// Largest supported Daubechies vanishing-moment count.
pub const MAX_ORDER: usize = 10;

/// A compactly supported orthonormal wavelet filter pair.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveletFilter {
    order: usize,
    low_pass: Vec<f64>,
    high_pass: Vec<f64>,
}

/// Canonical minimum-phase Daubechies filter with `order` vanishing moments.
///
/// `order = 1` is Haar. Supported range is `1..=10`.
pub fn daubechies_filter(order: usize) -> Result<WaveletFilter> {
    if order < 1 || order > MAX_ORDER {
        return Err(WignerError::InvalidArgument(format!(
            "Daubechies order {order} out of supported range 1..={MAX_ORDER}"
        )));
    }
    let low_pass = DAUBECHIES_LOW_PASS[order - 1].to_vec();
    let len = low_pass.len();
    let high_pass: Vec<f64> = (0..len)
        .map(|k| {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            sign * low_pass[len - 1 - k]
        })
        .collect();
    Ok(WaveletFilter {
        order,
        low_pass,
        high_pass,
    })
}

impl WaveletFilter {
    /// Vanishing-moment count N.
    pub fn order(&self) -> usize {
        self.order
    }

    /// Refinement mask, length 2N.
    pub fn low_pass(&self) -> &[f64] {
        &self.low_pass
    }

    /// Quadrature-mirror mask, length 2N.
    pub fn high_pass(&self) -> &[f64] {
        &self.high_pass
    }

    pub fn len(&self) -> usize {
        self.low_pass.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Support of the scaling function is `[0, support_end()]`.
    pub fn support_end(&self) -> usize {
        2 * self.order - 1
    }

    /// Autocorrelation `a(s) = sum_k h[k] h[k+s]` of the low-pass mask,
    /// for signed lag `s`; zero outside `|s| < 2N`.
    pub fn autocorrelation(&self, s: i64) -> f64 {
        let n = self.low_pass.len() as i64;
        let mut acc = 0.0;
        for k in 0..n {
            let j = k + s;
            if j >= 0 && j < n {
                acc += self.low_pass[k as usize] * self.low_pass[j as usize];
            }
        }
        acc
    }

    /// Discrete filter moments `sum_k h[k] k^m`.
    pub fn low_pass_moment(&self, m: u32) -> f64 {
        self.low_pass
            .iter()
            .enumerate()
            .map(|(k, &h)| h * (k as f64).powi(m as i32))
            .sum()
    }
}
