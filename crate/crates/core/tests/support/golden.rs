//! Twelve traces with component values worked out by hand against the
//! bundled sample lexicon, `k_max = 2` and the builtin embedder.

pub struct GoldenCase {
    pub id: &'static str,
    pub trace: &'static str,
    pub gt_labels: &'static [&'static str],
    pub gt_cues: &'static [&'static str],
    /// acc, fmt, think, cite, evid, sem
    pub expected: [f64; 6],
    pub length_penalty: f64,
}

const CUES: &[&str] = &["Tears on cheeks.", "trembling voice", "SLIGHT smile"];

pub fn golden_cases() -> Vec<GoldenCase> {
    vec![
        // Everything satisfied; five id citations all resolve; every pool
        // description has a normalized twin among the cues.
        GoldenCase {
            id: "g01-perfect",
            trace: "<hypotheses>\n[{\"id\":\"H1\",\"assumption\":\"upset by the news\",\"evidence\":[{\"id\":\"v1\",\"description\":\"tears on cheeks\"},{\"id\":\"a1\",\"description\":\"trembling voice\"}]},{\"id\":\"H2\",\"assumption\":\"moved by good news\",\"evidence\":[{\"id\":\"v2\",\"description\":\"slight smile\"}]}]\n</hypotheses>\n<think>\n**[Common]** [H1] and [H2] both rest on [v1].\n**[Differences]** [H1] is backed by [a1] while [H2] relies on [v2].\n**[Decision]** [a1] outweighs [v2], so [H1].\n</think>\n<answer>[\"sad\"]</answer>",
            gt_labels: &["sad"],
            gt_cues: CUES,
            expected: [1.0, 1.0, 1.0, 1.0, 1.0, 1.0],
            length_penalty: 1.0,
        },
        // Extra out-of-lexicon label: F1 = 2/3 on every wheel, penalty 1/2.
        GoldenCase {
            id: "g02-extra-label",
            trace: "<hypotheses>\n[{\"id\":\"H1\",\"assumption\":\"upset by the news\",\"evidence\":[{\"id\":\"v1\",\"description\":\"tears on cheeks\"},{\"id\":\"a1\",\"description\":\"trembling voice\"}]},{\"id\":\"H2\",\"assumption\":\"moved by good news\",\"evidence\":[{\"id\":\"v2\",\"description\":\"slight smile\"}]}]\n</hypotheses>\n<think>\n**[Common]** [H1] and [H2] both rest on [v1].\n**[Differences]** [H1] is backed by [a1] while [H2] relies on [v2].\n**[Decision]** [a1] outweighs [v2], so [H1].\n</think>\n<answer>[\"sad\",\"bored\"]</answer>",
            gt_labels: &["sad"],
            gt_cues: CUES,
            expected: [1.0 / 3.0, 1.0, 1.0, 1.0, 1.0, 1.0],
            length_penalty: 0.5,
        },
        // excited vs happy agree on four wheels, differ on intensity; cues
        // share nothing with the pool.
        GoldenCase {
            id: "g03-partial-wheels",
            trace: "<hypotheses>\n[{\"id\":\"H1\",\"assumption\":\"upset by the news\",\"evidence\":[{\"id\":\"v1\",\"description\":\"tears on cheeks\"},{\"id\":\"a1\",\"description\":\"trembling voice\"}]},{\"id\":\"H2\",\"assumption\":\"moved by good news\",\"evidence\":[{\"id\":\"v2\",\"description\":\"slight smile\"}]}]\n</hypotheses>\n<think>\n**[Common]** [H1] and [H2] both rest on [v1].\n**[Differences]** [H1] is backed by [a1] while [H2] relies on [v2].\n**[Decision]** [v2] wins, so [H2].\n</think>\n<answer>[\"excited\"]</answer>",
            gt_labels: &["happy"],
            gt_cues: &["quiet room"],
            expected: [0.8, 1.0, 1.0, 1.0, 1.0, 0.0],
            length_penalty: 1.0,
        },
        GoldenCase {
            id: "g04-empty",
            trace: "",
            gt_labels: &["sad"],
            gt_cues: CUES,
            expected: [0.0; 6],
            length_penalty: 0.0,
        },
        // No section headers: think is non-empty but no section exists, so
        // nothing is selected; the stray [v1] still resolves.
        GoldenCase {
            id: "g05-no-headers",
            trace: "<hypotheses>\n[{\"id\":\"H1\",\"assumption\":\"upset by the news\",\"evidence\":[{\"id\":\"v1\",\"description\":\"tears on cheeks\"},{\"id\":\"a1\",\"description\":\"trembling voice\"}]},{\"id\":\"H2\",\"assumption\":\"moved by good news\",\"evidence\":[{\"id\":\"v2\",\"description\":\"slight smile\"}]}]\n</hypotheses>\n<think>\nPlain reasoning that points at [v1] and [H1].\n</think>\n<answer>[\"sad\"]</answer>",
            gt_labels: &["sad"],
            gt_cues: CUES,
            expected: [1.0, 1.0, 0.0, 0.0, 1.0, 1.0],
            length_penalty: 1.0,
        },
        // Hypotheses block is not JSON: no candidates, empty pool.
        GoldenCase {
            id: "g06-bad-json",
            trace: "<hypotheses>\nH1: upset, H2: moved\n</hypotheses>\n<think>\n**[Common]** [H1] and [H2] both rest on [v1].\n**[Differences]** [H1] is backed by [a1].\n**[Decision]** [H1].\n</think>\n<answer>[\"sad\"]</answer>",
            gt_labels: &["sad"],
            gt_cues: CUES,
            expected: [1.0, 0.75, 1.0, 0.0, 0.0, 0.0],
            length_penalty: 1.0,
        },
        // Answer precedes think.
        GoldenCase {
            id: "g07-out-of-order",
            trace: "<hypotheses>\n[{\"id\":\"H1\",\"assumption\":\"upset by the news\",\"evidence\":[{\"id\":\"v1\",\"description\":\"tears on cheeks\"},{\"id\":\"a1\",\"description\":\"trembling voice\"}]},{\"id\":\"H2\",\"assumption\":\"moved by good news\",\"evidence\":[{\"id\":\"v2\",\"description\":\"slight smile\"}]}]\n</hypotheses>\n<answer>[\"sad\"]</answer>\n<think>\n**[Common]** [H1] and [H2] both rest on [v1].\n**[Differences]** [H1] is backed by [a1] while [H2] relies on [v2].\n**[Decision]** [a1] outweighs [v2], so [H1].\n</think>",
            gt_labels: &["sad"],
            gt_cues: CUES,
            expected: [1.0, 0.75, 1.0, 1.0, 1.0, 1.0],
            length_penalty: 1.0,
        },
        // Description citations: substring, superstring, one edit in 13
        // characters (similarity 12/13), and one miss. happy vs sad differ
        // on every wheel.
        GoldenCase {
            id: "g08-fuzzy-citations",
            trace: "<hypotheses>\n[{\"id\":\"H1\",\"assumption\":\"upset by the news\",\"evidence\":[{\"id\":\"v1\",\"description\":\"tears on cheeks\"},{\"id\":\"a1\",\"description\":\"trembling voice\"}]},{\"id\":\"H2\",\"assumption\":\"moved by good news\",\"evidence\":[{\"id\":\"v2\",\"description\":\"slight smile\"}]}]\n</hypotheses>\n<think>\n**[Common]** [H1] and [H2] share [tears on cheek].\n**[Differences]** [H1] has [trembling voices]; [H2] has [slightt smile] and [shaking hands].\n**[Decision]** [H2].\n</think>\n<answer>[\"happy\"]</answer>",
            gt_labels: &["sad"],
            gt_cues: CUES,
            expected: [0.0, 1.0, 1.0, 1.0, 0.75, 1.0],
            length_penalty: 1.0,
        },
        // Third hypothesis is cut by k_max = 2, so [H3] is not a candidate and
        // its evidence leaves the pool. lonely groups with sad on every
        // wheel; two predicted labels for one reference halve the reward.
        GoldenCase {
            id: "g09-truncated",
            trace: "<hypotheses>\n[{\"id\":\"H1\",\"assumption\":\"upset by the news\",\"evidence\":[{\"id\":\"v1\",\"description\":\"tears on cheeks\"},{\"id\":\"a1\",\"description\":\"trembling voice\"}]},{\"id\":\"H2\",\"assumption\":\"moved by good news\",\"evidence\":[{\"id\":\"v2\",\"description\":\"slight smile\"}]},{\"id\":\"H3\",\"assumption\":\"angry at someone\",\"evidence\":[{\"id\":\"v9\",\"description\":\"clenched jaw\"}]}]\n</hypotheses>\n<think>\n**[Common]** [H1] rests on [v1].\n**[Differences]** [H3] alone shows [v9].\n**[Decision]** [H3].\n</think>\n<answer>[\"sad\",\"lonely\"]</answer>",
            gt_labels: &["sad"],
            gt_cues: CUES,
            expected: [0.5, 1.0, 1.0, 1.0 / 3.0, 0.5, 1.0],
            length_penalty: 0.5,
        },
        // Alias tags and a comma-separated answer; decision names no
        // hypothesis, differences cite none, no evidence cited, no cues.
        GoldenCase {
            id: "g10-aliases",
            trace: "<hyp>\n[{\"id\":\"H1\",\"assumption\":\"grieving\",\"evidence\":[\"v1: tears on cheeks\"]},{\"id\":\"H2\",\"assumption\":\"proud of a child\",\"evidence\":[\"v2: chin raised\"]}]\n</hyp>\n<think>\n**[Common]** [H1] and [H2] both fit.\n**[Differences]** one is grief, the other pride.\n**[Decision]** both feelings are present.\n</think>\n<ans>sad, proud</ans>",
            gt_labels: &["sad", "proud"],
            gt_cues: &[],
            expected: [1.0, 1.0, 1.0, 1.0 / 3.0, 0.0, 0.0],
            length_penalty: 1.0,
        },
        GoldenCase {
            id: "g11-empty-answer",
            trace: "<hypotheses>\n[{\"id\":\"H1\",\"assumption\":\"upset by the news\",\"evidence\":[{\"id\":\"v1\",\"description\":\"tears on cheeks\"},{\"id\":\"a1\",\"description\":\"trembling voice\"}]},{\"id\":\"H2\",\"assumption\":\"moved by good news\",\"evidence\":[{\"id\":\"v2\",\"description\":\"slight smile\"}]}]\n</hypotheses>\n<think>\n**[Common]** [H1] and [H2] both rest on [v1].\n**[Differences]** [H1] is backed by [a1] while [H2] relies on [v2].\n**[Decision]** [a1] outweighs [v2], so [H1].\n</think>\n<answer>[]</answer>",
            gt_labels: &["sad"],
            gt_cues: CUES,
            expected: [0.0, 0.75, 1.0, 1.0, 1.0, 1.0],
            length_penalty: 0.0,
        },
        // sadness -> sad (inflection), joyful -> happy and unhappy -> sad
        // (synonyms): the grouped sets coincide. Half the pool matches a cue,
        // half the cited ids resolve.
        GoldenCase {
            id: "g12-grouped-labels",
            trace: "<hypotheses>\n[{\"id\":\"H1\",\"assumption\":\"bittersweet farewell\",\"evidence\":[{\"id\":\"v1\",\"description\":\"tears on cheeks\"},{\"id\":\"v2\",\"description\":\"fists clenched tight\"}]}]\n</hypotheses>\n<think>\n**[Common]** [H1] explains [v1].\n**[Differences]** [H1] also covers [v3].\n**[Decision]** [H1].\n</think>\n<answer>[\"sadness\",\"joyful\"]</answer>",
            gt_labels: &["unhappy", "happy"],
            gt_cues: &["tears on cheeks"],
            expected: [1.0, 1.0, 1.0, 1.0, 0.5, 0.5],
            length_penalty: 1.0,
        },
    ]
}

/// Weighted sum with the reference weights, written out independently of
/// the library's defaults.
pub fn oracle_total(c: &[f64; 6]) -> f64 {
    4.0 * c[0] + 0.5 * c[1] + 0.5 * c[2] + 1.0 * c[3] + 2.0 * c[4] + 2.0 * c[5]
}
