#include "summands/runner.hpp"

#include <chrono>
#include <map>
#include <ostream>

#include "summands/frobenius.hpp"

namespace summands {

using nlohmann::json;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::SyntaxError: return 1;
    case ErrorCode::UnsupportedExtension:
    case ErrorCode::NotAnExtension: return 3;
    case ErrorCode::ResourceLimit:
    case ErrorCode::BoundExceeded: return 4;
    case ErrorCode::IdempotencyCheckFailed: return 5;
    default: return 2;
  }
}

namespace {

bool standard_grading(const Ring& R) {
  if (R.is_local() || R.grading_rank() != 1) return false;
  for (auto& d : R.variable_degrees())
    if (d[0] != 1) return false;
  return true;
}

std::string free_label(const Ring& R, const Degree& d) {
  if (R.is_local()) return "R";
  if (standard_grading(R)) return "O(" + std::to_string(-d[0]) + ")";
  std::string s = "R(";
  for (size_t k = 0; k < d.size(); ++k) s += (k ? "," : "") + std::to_string(-d[k]);
  return s + ")";
}

std::string degree_text(const Degree& d) {
  if (d.size() == 1) return std::to_string(d[0]);
  std::string s = "(";
  for (size_t k = 0; k < d.size(); ++k) s += (k ? "," : "") + std::to_string(d[k]);
  return s + ")";
}

json degree_json(const Degree& d) {
  json a = json::array();
  for (auto x : d) a.push_back(x);
  return a;
}

// Rows are generators of the target, columns the images.
json matrix_json(const Ring& R, const std::vector<Column>& cols, size_t rows) {
  json m = json::array();
  for (size_t i = 0; i < rows; ++i) {
    json row = json::array();
    for (auto& c : cols) row.push_back(R.format(c[i]));
    m.push_back(row);
  }
  return m;
}

std::string matrix_text(const Ring& R, const std::vector<Column>& cols, size_t rows) {
  std::string s = "[";
  for (size_t i = 0; i < rows; ++i) {
    s += i ? ", [" : "[";
    for (size_t j = 0; j < cols.size(); ++j) s += (j ? ", " : "") + R.format(cols[j][i]);
    s += "]";
  }
  return s + "]";
}

bool truthy(const std::string& v) { return v == "true" || v == "1"; }

CertifyLevel certify_level(const std::string& v) {
  if (v == "minpoly") return CertifyLevel::Minpoly;
  if (v == "charpoly") return CertifyLevel::Charpoly;
  return CertifyLevel::Quick;
}

std::string level_name(CertifyLevel l) {
  switch (l) {
    case CertifyLevel::Quick: return "quick";
    case CertifyLevel::Minpoly: return "minpoly";
    case CertifyLevel::Charpoly: return "charpoly";
  }
  return "";
}

struct Runner {
  const TaskFile& file;
  const RunOptions& opt;
  std::ostream& out;
  std::ostream& err;
  std::map<std::string, ModulePtr> modules;

  ModulePtr lookup(const TaskSpec& t) const {
    auto it = modules.find(t.target);
    if (it == modules.end())
      throw TaskFileError(ErrorCode::SemanticError, t.line, 1, "undefined module '" + t.target + "'", "");
    return it->second;
  }

  uint64_t seed_of(const TaskSpec& t) const {
    if (auto it = t.options.find("seed"); it != t.options.end()) return std::stoull(it->second);
    return opt.seed.value_or(0);
  }

  DecomposeConfig config(const TaskSpec& t, const ModulePtr& M) const {
    DecomposeConfig c;
    c.seed = seed_of(t);
    if (opt.attempts) c.attempts = *opt.attempts;
    if (auto it = t.options.find("attempts"); it != t.options.end()) c.attempts = std::stoi(it->second);
    c.autoextend = opt.autoextend;
    if (auto it = t.options.find("autoextend"); it != t.options.end()) c.autoextend = truthy(it->second);
    if (opt.max_extension) {
      const Field& F = *M->ring()->field();
      double lim = 1;
      for (unsigned k = 0; k < *opt.max_extension && lim <= double(kExtensionLimit); ++k) lim *= double(F.order());
      c.extension_limit = uint64_t(std::min(lim, double(kExtensionLimit)));
    }
    if (auto it = t.options.find("certify"); it != t.options.end()) c.certify = certify_level(it->second);
    if (auto it = t.options.find("group"); it != t.options.end()) c.group = truthy(it->second);
    if (auto it = t.options.find("ignore-shifts"); it != t.options.end()) c.shift_insensitive = truthy(it->second);
    c.window = opt.degree_window;
    return c;
  }

  void define(const std::string& name, ModulePtr M) { modules[name] = std::move(M); }

  void describe_module(const std::string& name, const Presentation& M, json& rec) {
    const Ring& R = *M.ring();
    out << "  " << name << ": " << M.ngens() << (M.ngens() == 1 ? " generator" : " generators");
    if (M.is_free()) out << ", free";
    out << "\n";
    rec["generators"] = M.ngens();
    rec["free"] = M.is_free();
    json degs = json::array();
    for (auto& d : M.degrees()) degs.push_back(degree_json(d));
    rec["degrees"] = degs;
    rec["relations"] = matrix_json(R, M.relations(), M.ngens());
    rec["module_block"] = format_module_block(name, M);
  }

  void decompose_task(const TaskSpec& t, json& rec) {
    ModulePtr M = lookup(t);
    auto cfg = config(t, M);
    rec["seed"] = cfg.seed;
    Decomposition D = decompose(M, cfg);
    const Ring& R = *D.module->ring();
    std::string summary = summary_line(D);
    out << "  field: " << D.field->name() << (D.extended ? " (extended)" : "") << "\n";
    out << "  " << summary << "\n";
    rec["field"] = D.field->name();
    rec["extended"] = D.extended;
    rec["field_block"] = "field " + D.field->name() + ";";
    rec["ring_block"] = format_ring_block(R);
    rec["summary"] = summary;
    rec["samples"] = D.samples;

    std::vector<std::string> labels(D.groups.size());
    size_t k = 0;
    for (size_t g = 0; g < D.groups.size(); ++g) {
      const Summand& rep = D.summands[D.groups[g].representative];
      if (rep.status == SummandStatus::FreeLineBundle) continue;
      labels[g] = "M" + std::to_string(++k);
      out << "  " << labels[g] << " x" << D.groups[g].members.size() << ": " << status_name(rep.status) << ", "
          << rep.module->ngens() << " generators, degrees [";
      for (size_t i = 0; i < rep.module->ngens(); ++i) out << (i ? ", " : "") << degree_text(rep.module->degree(i));
      out << "], relations " << matrix_text(R, rep.module->relations(), rep.module->ngens()) << "\n";
    }
    json groups = json::array();
    for (size_t g = 0; g < D.groups.size(); ++g) {
      const Summand& rep = D.summands[D.groups[g].representative];
      json gj;
      gj["label"] = rep.status == SummandStatus::FreeLineBundle ? free_label(R, rep.free_degree) : labels[g];
      gj["representative"] = D.groups[g].representative;
      gj["members"] = D.groups[g].members;
      gj["multiplicity"] = D.groups[g].members.size();
      groups.push_back(gj);
    }
    rec["groups"] = groups;

    json summands = json::array();
    for (size_t i = 0; i < D.summands.size(); ++i) {
      const Summand& s = D.summands[i];
      json sj;
      std::string name = t.output + "_" + std::to_string(i + 1);
      sj["name"] = name;
      sj["group"] = s.group;
      sj["status"] = status_name(s.status);
      sj["generators"] = s.module->ngens();
      json degs = json::array();
      for (auto& d : s.module->degrees()) degs.push_back(degree_json(d));
      sj["degrees"] = degs;
      sj["relations"] = matrix_json(R, s.module->relations(), s.module->ngens());
      sj["twist"] = degree_json(s.twist);
      sj["exact_witnesses"] = s.exact;
      sj["module_block"] = format_module_block(name, *s.module);
      if (opt.emit_basis) {
        sj["inclusion"] = matrix_json(R, s.inclusion.images, D.module->ngens());
        sj["projection"] = matrix_json(R, s.projection.images, s.module->ngens());
      }
      summands.push_back(sj);
      define(name, s.module);
    }
    rec["summands"] = summands;
    if (opt.emit_basis) emit_basis(D);
    json notes = json::array();
    for (auto& n : D.notes) {
      out << "  note: " << n << "\n";
      notes.push_back(n);
    }
    rec["notes"] = notes;
  }

  // Columns of P are the inclusion images, rows of Q the projections, in
  // summand order; P^-1 A P is block diagonal for the presentation A.
  void emit_basis(const Decomposition& D) {
    const Ring& R = *D.module->ring();
    size_t mu = D.module->ngens();
    std::vector<Column> P, Q(mu);
    for (auto& s : D.summands)
      for (auto& c : s.inclusion.images) P.push_back(c);
    for (size_t j = 0; j < mu; ++j)
      for (auto& s : D.summands)
        for (auto& p : s.projection.images[j]) Q[j].push_back(p);
    out << "  basis P (inclusions): " << matrix_text(R, P, mu) << "\n";
    size_t rows = 0;
    for (auto& s : D.summands) rows += s.module->ngens();
    out << "  basis Q (projections): " << matrix_text(R, Q, rows) << "\n";
  }

  void end0_task(const TaskSpec& t, json& rec) {
    ModulePtr M = minimize(lookup(t)).module;
    End0Basis B = end0_basis(M);
    auto cert = certify_reductions(B.reductions, CertifyLevel::Quick);
    out << "  " << B.r() << (B.graded ? " degree-zero" : "") << " endomorphisms of " << M->ngens()
        << " generators; quick certificate: " << (cert.certified ? "indecomposable" : "none") << " (" << cert.witness
        << ")\n";
    rec["basis_size"] = B.r();
    rec["graded"] = B.graded;
    json reds = json::array();
    for (auto& A : B.reductions) {
      json m = json::array();
      for (size_t i = 0; i < A.rows(); ++i) {
        json row = json::array();
        for (size_t j = 0; j < A.cols(); ++j) row.push_back(A.field()->format(A(i, j)));
        m.push_back(row);
      }
      reds.push_back(m);
    }
    rec["reductions"] = reds;
    rec["certified"] = cert.certified;
    rec["witness"] = cert.witness;
  }

  void frobenius_task(const TaskSpec& t, json& rec) {
    unsigned e = unsigned(std::stoul(t.options.at("e")));
    auto conv = TwistConvention::Sheaf;
    if (auto it = t.options.find("convention"); it != t.options.end() && it->second == "full") conv = TwistConvention::Full;
    bool minimal = true;
    if (auto it = t.options.find("minimal"); it != t.options.end()) minimal = truthy(it->second);
    auto F = pushforward_module(lookup(t), e, conv, minimal);
    rec["convention"] = conv == TwistConvention::Full ? "full" : "sheaf";
    describe_module(t.output, *F, rec);
    define(t.output, F);
  }

  void syzygy_task(const TaskSpec& t, json& rec) {
    unsigned i = unsigned(std::stoul(t.options.at("i")));
    auto S = syzygy_module(lookup(t), i);
    describe_module(t.output, *S, rec);
    define(t.output, S);
  }

  void certify_task(const TaskSpec& t, json& rec) {
    CertifyLevel level = CertifyLevel::Quick;
    if (auto it = t.options.find("level"); it != t.options.end()) level = certify_level(it->second);
    auto cert = certify_indecomposable(minimize(lookup(t)).module, level);
    out << "  " << (cert.certified ? "certified-indecomposable" : "not certified") << " (" << level_name(level)
        << ": " << cert.witness << ")\n";
    rec["level"] = level_name(level);
    rec["certified"] = cert.certified;
    rec["witness"] = cert.witness;
  }

  void hilbert_task(const TaskSpec& t, json& rec) {
    ModulePtr M = lookup(t);
    if (!M->graded()) fail(ErrorCode::NotGraded, "Hilbert functions need a graded ring");
    std::vector<Degree> window;
    bool range = t.options.count("from") || t.options.count("to");
    if (range) {
      if (M->ring()->grading_rank() != 1) fail(ErrorCode::SemanticError, "from/to ranges need a rank-one grading");
      int64_t a = t.options.count("from") ? std::stoll(t.options.at("from")) : 0;
      int64_t b = t.options.count("to") ? std::stoll(t.options.at("to")) : a + 2 * opt.degree_window;
      if (b < a || b - a > 10000) fail(ErrorCode::SemanticError, "bad degree range");
      for (int64_t d = a; d <= b; ++d) window.push_back({d});
    } else {
      int w = opt.degree_window;
      if (auto it = t.options.find("window"); it != t.options.end()) w = std::stoi(it->second);
      window = default_window(*M, w);
    }
    auto h = hilbert_window(*M, window);
    json vals = json::array();
    out << "  hilbert:";
    for (size_t k = 0; k < window.size(); ++k) {
      out << " " << degree_text(window[k]) << ":" << h[k];
      vals.push_back({degree_json(window[k]), h[k]});
    }
    out << "\n";
    rec["values"] = vals;
  }
};

}  // namespace

std::string summary_line(const Decomposition& D) {
  const Ring& R = *D.module->ring();
  std::map<Degree, size_t> free;
  std::vector<std::pair<size_t, size_t>> other;  // group, count
  for (size_t g = 0; g < D.groups.size(); ++g) {
    const Summand& rep = D.summands[D.groups[g].representative];
    if (rep.status == SummandStatus::FreeLineBundle) {
      for (auto m : D.groups[g].members) ++free[D.summands[m].free_degree];
    } else {
      other.push_back({g, D.groups[g].members.size()});
    }
  }
  std::string s;
  for (auto& [d, n] : free) s += (s.empty() ? "" : " + ") + free_label(R, d) + "^" + std::to_string(n);
  for (size_t k = 0; k < other.size(); ++k)
    s += (s.empty() ? "" : " + ") + std::string("M") + std::to_string(k + 1) + "^" + std::to_string(other[k].second);
  return s.empty() ? "0" : s;
}

RunReport run_tasks(const TaskFile& file, const RunOptions& options, std::ostream& out, std::ostream& err) {
  RunReport report;
  Runner run{file, options, out, err, {}};
  for (auto& m : file.modules) run.define(m.name, m.module);
  for (size_t i = 0; i < file.tasks.size(); ++i) {
    const TaskSpec& t = file.tasks[i];
    json rec;
    rec["index"] = i + 1;
    rec["verb"] = t.verb;
    rec["target"] = t.target;
    rec["output"] = t.output;
    rec["line"] = t.line;
    rec["options"] = t.options;
    rec["seed"] = run.seed_of(t);
    out << "task " << i + 1 << ": " << t.verb << " " << t.target;
    for (auto& [k, v] : t.options) out << " " << k << "=" << v;
    out << "\n";
    auto t0 = std::chrono::steady_clock::now();
    try {
      if (t.verb == "decompose") run.decompose_task(t, rec);
      else if (t.verb == "end0") run.end0_task(t, rec);
      else if (t.verb == "frobenius") run.frobenius_task(t, rec);
      else if (t.verb == "syzygy") run.syzygy_task(t, rec);
      else if (t.verb == "certify") run.certify_task(t, rec);
      else if (t.verb == "hilbert") run.hilbert_task(t, rec);
    } catch (const Error& e) {
      report.exit_code = exit_code_for(e.code());
      err << "error: task " << i + 1 << " (line " << t.line << ", " << t.verb << " " << t.target
          << "): " << error_code_name(e.code()) << ": " << e.what() << "\n";
      rec["error"] = {{"code", error_code_name(e.code())}, {"message", e.what()}};
      report.records.push_back(rec);
      return report;
    }
    double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    if (options.timing) rec["elapsed_ms"] = ms;
    if (options.verbose) err << "task " << i + 1 << " took " << ms << " ms\n";
    report.records.push_back(rec);
  }
  return report;
}

}  // namespace summands
