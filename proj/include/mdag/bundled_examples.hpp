#pragma once

#include <string>
#include <vector>

namespace mdag {

// Golden graph fixtures shipped with the library, one per figure of the
// missing-data identification catalog this project covers:
//   fig1b        MCAR: one variable, indicator unconnected to it
//   fig1d        MAR: missingness driven by a fully observed covariate
//   fig2a-naive  the deliberately wrong self-censoring encoding that
//                conflates the proxy with its counterfactual (cyclic)
//   fig2c        self-censoring, counterfactual-as-confounder view
//   fig2d        the same full-data graph (fig2c is its R=1 template)
//   fig3a        block-parallel: each indicator driven by the other
//                variable's counterfactual
//   fig4a        treatment/outcome censoring with observed confounding
// The same texts ship as files under data/.
struct ExampleFile {
    std::string name;
    std::string json;
};

inline const std::vector<ExampleFile>& bundled_examples() {
    static const std::vector<ExampleFile> files = {
        {"fig1b", R"json({
  "vertices": [
    {"name": "L(1)", "kind": "counterfactual", "cardinality": 2},
    {"name": "R", "kind": "indicator", "cardinality": 2},
    {"name": "L", "kind": "proxy", "cardinality": 3}
  ],
  "edges": [
    ["L(1)", "L"],
    ["R", "L"]
  ],
  "pairs": [
    {"proxy": "L", "counterfactual": "L(1)", "indicator": "R"}
  ]
}
)json"},
        {"fig1d", R"json({
  "vertices": [
    {"name": "X", "kind": "observed", "cardinality": 2},
    {"name": "L(1)", "kind": "counterfactual", "cardinality": 2},
    {"name": "R", "kind": "indicator", "cardinality": 2},
    {"name": "L", "kind": "proxy", "cardinality": 3}
  ],
  "edges": [
    ["X", "L(1)"],
    ["X", "R"],
    ["L(1)", "L"],
    ["R", "L"]
  ],
  "pairs": [
    {"proxy": "L", "counterfactual": "L(1)", "indicator": "R"}
  ]
}
)json"},
        {"fig2a-naive", R"json({
  "vertices": [
    {"name": "R", "kind": "indicator", "cardinality": 2},
    {"name": "L", "kind": "proxy", "cardinality": 3}
  ],
  "edges": [
    ["R", "L"],
    ["L", "R"]
  ],
  "pairs": []
}
)json"},
        {"fig2c", R"json({
  "vertices": [
    {"name": "U", "kind": "counterfactual", "cardinality": 2},
    {"name": "R", "kind": "indicator", "cardinality": 2},
    {"name": "L", "kind": "proxy", "cardinality": 3}
  ],
  "edges": [
    ["U", "R"],
    ["U", "L"],
    ["R", "L"]
  ],
  "pairs": [
    {"proxy": "L", "counterfactual": "U", "indicator": "R"}
  ]
}
)json"},
        {"fig2d", R"json({
  "vertices": [
    {"name": "U", "kind": "counterfactual", "cardinality": 2},
    {"name": "R", "kind": "indicator", "cardinality": 2},
    {"name": "L", "kind": "proxy", "cardinality": 3}
  ],
  "edges": [
    ["U", "R"],
    ["U", "L"],
    ["R", "L"]
  ],
  "pairs": [
    {"proxy": "L", "counterfactual": "U", "indicator": "R"}
  ]
}
)json"},
        {"fig3a", R"json({
  "vertices": [
    {"name": "U1", "kind": "counterfactual", "cardinality": 2},
    {"name": "U2", "kind": "counterfactual", "cardinality": 2},
    {"name": "R1", "kind": "indicator", "cardinality": 2},
    {"name": "R2", "kind": "indicator", "cardinality": 2},
    {"name": "L1", "kind": "proxy", "cardinality": 3},
    {"name": "L2", "kind": "proxy", "cardinality": 3}
  ],
  "edges": [
    ["U1", "U2"],
    ["U1", "R2"],
    ["U2", "R1"],
    ["U1", "L1"],
    ["R1", "L1"],
    ["U2", "L2"],
    ["R2", "L2"]
  ],
  "pairs": [
    {"proxy": "L1", "counterfactual": "U1", "indicator": "R1"},
    {"proxy": "L2", "counterfactual": "U2", "indicator": "R2"}
  ]
}
)json"},
        {"fig4a", R"json({
  "vertices": [
    {"name": "X", "kind": "observed", "cardinality": 2},
    {"name": "A(1)", "kind": "counterfactual", "cardinality": 2},
    {"name": "Y(1)", "kind": "counterfactual", "cardinality": 2},
    {"name": "R_A", "kind": "indicator", "cardinality": 2},
    {"name": "R_Y", "kind": "indicator", "cardinality": 2},
    {"name": "A", "kind": "proxy", "cardinality": 3},
    {"name": "Y", "kind": "proxy", "cardinality": 3}
  ],
  "edges": [
    ["X", "A(1)"],
    ["X", "Y(1)"],
    ["A(1)", "Y(1)"],
    ["A(1)", "R_Y"],
    ["Y(1)", "R_A"],
    ["A(1)", "A"],
    ["R_A", "A"],
    ["Y(1)", "Y"],
    ["R_Y", "Y"]
  ],
  "pairs": [
    {"proxy": "A", "counterfactual": "A(1)", "indicator": "R_A"},
    {"proxy": "Y", "counterfactual": "Y(1)", "indicator": "R_Y"}
  ]
}
)json"}};
    return files;
}

// The K=2 sequentially-fixable pattern registered in engine.hpp, shipped as
// a fixture alongside the figure graphs (data/permutation2.json).
inline std::string permutation2_json() {
    return R"json({
  "vertices": [
    {"name": "L1(1)", "kind": "counterfactual", "cardinality": 2},
    {"name": "L2(1)", "kind": "counterfactual", "cardinality": 2},
    {"name": "R1", "kind": "indicator", "cardinality": 2},
    {"name": "R2", "kind": "indicator", "cardinality": 2},
    {"name": "L1", "kind": "proxy", "cardinality": 3},
    {"name": "L2", "kind": "proxy", "cardinality": 3}
  ],
  "edges": [
    ["L1(1)", "L2(1)"],
    ["L2(1)", "R1"],
    ["L1", "R2"],
    ["R1", "R2"],
    ["L1(1)", "L1"],
    ["R1", "L1"],
    ["L2(1)", "L2"],
    ["R2", "L2"]
  ],
  "pairs": [
    {"proxy": "L1", "counterfactual": "L1(1)", "indicator": "R1"},
    {"proxy": "L2", "counterfactual": "L2(1)", "indicator": "R2"}
  ]
}
)json";
}

}  // namespace mdag
