#include "spme/bitperm.hpp"

#include <algorithm>
#include <sstream>

namespace spme {

std::string to_string(BitLabel l) {
    static const char* axis_names = "XYZ";
    return std::string(1, axis_names[int(l.axis)]) + std::to_string(l.index);
}

namespace {

void check_labels(const std::vector<BitLabel>& labels, const char* side) {
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i].index < 0 || labels[i].index > 30)
            throw std::invalid_argument(std::string("PermutationSpec: ") + side + " label " +
                                        to_string(labels[i]) + " index out of range");
        for (std::size_t j = i + 1; j < labels.size(); ++j)
            if (labels[i] == labels[j])
                throw std::invalid_argument(std::string("PermutationSpec: duplicate ") + side +
                                            " label " + to_string(labels[i]));
    }
}

} // namespace

void PermutationSpec::validate() const {
    if (in.size() != out.size())
        throw std::invalid_argument("PermutationSpec: in/out widths differ");
    if (in.size() > 31) throw std::invalid_argument("PermutationSpec: width > 31");
    check_labels(in, "in");
    check_labels(out, "out");
    for (const BitLabel& l : out)
        if (std::find(in.begin(), in.end(), l) == in.end())
            throw std::invalid_argument("PermutationSpec: out label " + to_string(l) +
                                        " not present in input labels");
}

PermParseError::PermParseError(int line_, int col_, const std::string& what)
    : std::runtime_error("line " + std::to_string(line_) + ", col " + std::to_string(col_) +
                         ": " + what),
      line(line_), col(col_) {}

namespace {

// Parses one whitespace-separated token list after the `in:`/`out:` prefix.
// `base_col` is the 1-based column where the token region starts.
std::vector<BitLabel> parse_label_list(const std::string& body, int line, int base_col) {
    std::vector<BitLabel> labels;
    std::size_t i = 0;
    while (i < body.size()) {
        if (std::isspace(static_cast<unsigned char>(body[i]))) { ++i; continue; }
        std::size_t start = i;
        while (i < body.size() && !std::isspace(static_cast<unsigned char>(body[i]))) ++i;
        std::string tok = body.substr(start, i - start);
        int col = base_col + int(start);
        Axis axis;
        switch (tok[0]) {
            case 'X': axis = Axis::X; break;
            case 'Y': axis = Axis::Y; break;
            case 'Z': axis = Axis::Z; break;
            default: throw PermParseError(line, col, "malformed label '" + tok + "'");
        }
        if (tok.size() < 2 || tok.size() > 3 ||
            !std::all_of(tok.begin() + 1, tok.end(),
                         [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
            throw PermParseError(line, col, "malformed label '" + tok + "'");
        BitLabel l{axis, std::stoi(tok.substr(1))};
        for (std::size_t k = 0; k < labels.size(); ++k)
            if (labels[k] == l)
                throw PermParseError(line, col, "duplicate label '" + tok + "'");
        labels.push_back(l);
    }
    return labels;
}

} // namespace

PermutationSpec parse_perm_file(std::string_view text) {
    PermutationSpec spec;
    bool have_in = false, have_out = false;
    int in_line = 0, out_line = 0;
    std::istringstream is{std::string(text)};
    std::string raw;
    int line_no = 0;
    while (std::getline(is, raw)) {
        ++line_no;
        std::string line = raw.substr(0, raw.find('#'));
        std::size_t first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        if (line.compare(first, 3, "in:") == 0) {
            if (have_in) throw PermParseError(line_no, int(first) + 1, "duplicate 'in:' line");
            spec.in = parse_label_list(line.substr(first + 3), line_no, int(first) + 4);
            have_in = true;
            in_line = line_no;
        } else if (line.compare(first, 4, "out:") == 0) {
            if (have_out) throw PermParseError(line_no, int(first) + 1, "duplicate 'out:' line");
            spec.out = parse_label_list(line.substr(first + 4), line_no, int(first) + 5);
            have_out = true;
            out_line = line_no;
        } else {
            throw PermParseError(line_no, int(first) + 1, "expected 'in:' or 'out:' line");
        }
    }
    if (!have_in) throw PermParseError(line_no + 1, 1, "missing 'in:' line");
    if (!have_out) throw PermParseError(line_no + 1, 1, "missing 'out:' line");
    if (spec.in.size() != spec.out.size())
        throw PermParseError(out_line, 1, "in/out widths differ (" +
                             std::to_string(spec.in.size()) + " vs " +
                             std::to_string(spec.out.size()) + ")");
    try {
        spec.validate();
    } catch (const std::invalid_argument& e) {
        throw PermParseError(std::max(in_line, out_line), 1, e.what());
    }
    return spec;
}

std::string format_perm_file(const PermutationSpec& spec) {
    std::ostringstream os;
    os << "in:";
    for (const BitLabel& l : spec.in) os << ' ' << to_string(l);
    os << "\nout:";
    for (const BitLabel& l : spec.out) os << ' ' << to_string(l);
    os << '\n';
    return os.str();
}

PermutationSpec inverse(const PermutationSpec& spec) {
    return PermutationSpec{spec.out, spec.in};
}

std::vector<int> source_bit_map(const PermutationSpec& spec) {
    std::vector<int> src(spec.out.size());
    for (std::size_t j = 0; j < spec.out.size(); ++j) {
        auto it = std::find(spec.in.begin(), spec.in.end(), spec.out[j]);
        src[j] = int(it - spec.in.begin());
    }
    return src;
}

std::vector<cplx> apply_permutation(const Volume3D& v, const PermutationSpec& spec) {
    spec.validate();
    int want = log2_exact(v.nx) + log2_exact(v.ny) + log2_exact(v.nz);
    if (spec.width() != want)
        throw std::invalid_argument("apply_permutation: spec width " +
                                    std::to_string(spec.width()) + " != volume bits " +
                                    std::to_string(want));
    int counts[3] = {0, 0, 0};
    for (const BitLabel& l : spec.in) ++counts[int(l.axis)];
    if (counts[0] != log2_exact(v.nx) || counts[1] != log2_exact(v.ny) ||
        counts[2] != log2_exact(v.nz))
        throw std::invalid_argument("apply_permutation: spec axis widths do not match volume");
    return apply_permutation(std::span<const cplx>(v.data.data(), v.data.size()), spec);
}

std::vector<BitLabel> axis_labels(Axis axis, int count) {
    std::vector<BitLabel> labels;
    labels.reserve(count);
    for (int i = 0; i < count; ++i) labels.push_back({axis, i});
    return labels;
}

std::vector<BitLabel> natural_labels(int nx, int ny, int nz) {
    std::vector<BitLabel> labels = axis_labels(Axis::X, log2_exact(nx));
    auto ys = axis_labels(Axis::Y, log2_exact(ny));
    auto zs = axis_labels(Axis::Z, log2_exact(nz));
    labels.insert(labels.end(), ys.begin(), ys.end());
    labels.insert(labels.end(), zs.begin(), zs.end());
    return labels;
}

PermutationSpec bit_reversal_spec(int n) {
    int b = log2_exact(n);
    PermutationSpec spec;
    spec.in = axis_labels(Axis::X, b);
    spec.out.resize(b);
    for (int j = 0; j < b; ++j) spec.out[j] = spec.in[b - 1 - j];
    return spec;
}

PermutationSpec lane_input_order(int n, int lanes) {
    if (!is_pow2(n) || !is_pow2(lanes) || n < lanes || lanes < 1)
        throw std::invalid_argument("lane_input_order: need powers of two with n >= lanes >= 1");
    int b = log2_exact(n);
    int lb = log2_exact(lanes);
    PermutationSpec spec;
    spec.in = axis_labels(Axis::X, b);
    spec.out = spec.in;
    for (int j = 0; j < lb; ++j) spec.out[j] = spec.in[lb - 1 - j];
    return spec;
}

PermutationSpec axis_front_spec(int nx, int ny, int nz, Axis axis) {
    PermutationSpec spec;
    spec.in = natural_labels(nx, ny, nz);
    int widths[3] = {log2_exact(nx), log2_exact(ny), log2_exact(nz)};
    spec.out = axis_labels(axis, widths[int(axis)]);
    for (Axis other : {Axis::X, Axis::Y, Axis::Z}) {
        if (other == axis) continue;
        auto group = axis_labels(other, widths[int(other)]);
        spec.out.insert(spec.out.end(), group.begin(), group.end());
    }
    return spec;
}

} // namespace spme
