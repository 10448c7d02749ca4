#include "dae/kernel_text.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace dae {

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string strip_comment(const std::string& line) {
  size_t h = line.find('#');
  return h == std::string::npos ? line : line.substr(0, h);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

[[noreturn]] void parse_fail(const std::string& origin, int lineno, const std::string& what) {
  fail(ErrCode::ParseError, origin + ":" + std::to_string(lineno) + ": " + what);
}

int64_t to_int(const std::string& s, const std::string& origin, int lineno) {
  try {
    size_t pos = 0;
    int64_t v = std::stoll(s, &pos, 0);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    parse_fail(origin, lineno, "expected integer, got '" + s + "'");
  }
}

int32_t parse_elem_size(const std::string& s, const std::string& origin, int lineno) {
  static const std::unordered_map<std::string, int32_t> kTypes = {
      {"i8", 1}, {"i16", 2}, {"i32", 4}, {"i64", 8}, {"f32", 4}, {"f64", 8}};
  auto it = kTypes.find(s);
  if (it != kTypes.end()) return it->second;
  if (s.size() > 1 && s[0] == 'b') return static_cast<int32_t>(to_int(s.substr(1), origin, lineno));
  parse_fail(origin, lineno, "unknown element type '" + s + "'");
}

std::string elem_size_name(int32_t bytes) {
  // Serialization favours raw byte sizes; element width only matters for
  // address arithmetic, not for value semantics.
  switch (bytes) {
    case 4: return "i32";
    case 8: return "i64";
    default: return "b" + std::to_string(bytes);
  }
}

// index ::= [scale*]i[+/-off] | const | [scale*]@id[+/-off]
void parse_index_expr(const std::string& s, AddressExpr* a, const std::string& origin, int lineno) {
  std::string t = s;
  a->scale = 1;
  a->offset = 0;
  a->source = kNoInstr;
  size_t star = t.find('*');
  if (star != std::string::npos) {
    a->scale = to_int(t.substr(0, star), origin, lineno);
    t = t.substr(star + 1);
  }
  if (t.empty()) parse_fail(origin, lineno, "empty index expression");
  bool has_var = false;
  if (t[0] == 'i' || t[0] == '@') {
    has_var = true;
    if (t[0] == '@') {
      size_t p = 1;
      while (p < t.size() && (std::isdigit(static_cast<unsigned char>(t[p])))) ++p;
      if (p == 1) parse_fail(origin, lineno, "expected load id after '@'");
      a->source = static_cast<InstrId>(to_int(t.substr(1, p - 1), origin, lineno));
      t = t.substr(p);
    } else {
      t = t.substr(1);
    }
    if (!t.empty()) {
      if (t[0] != '+' && t[0] != '-') parse_fail(origin, lineno, "bad index expression '" + s + "'");
      a->offset = to_int(t, origin, lineno);
    }
  } else {
    // pure constant: scale*const folded into offset
    a->offset = a->scale * to_int(t, origin, lineno);
    a->scale = 0;
  }
  (void)has_var;
}

std::string index_expr_to_string(const AddressExpr& a) {
  std::string var = a.source == kNoInstr ? "i" : "@" + std::to_string(a.source);
  if (a.scale == 0) return std::to_string(a.offset);
  std::string s;
  if (a.scale != 1) s += std::to_string(a.scale) + "*";
  s += var;
  if (a.offset > 0) s += "+" + std::to_string(a.offset);
  if (a.offset < 0) s += std::to_string(a.offset);
  return s;
}

std::vector<InstrId> parse_id_list(const std::string& s, const std::string& origin, int lineno) {
  std::vector<InstrId> out;
  std::string cur;
  for (char c : s + ",") {
    if (c == ',') {
      if (!cur.empty()) out.push_back(static_cast<InstrId>(to_int(cur, origin, lineno)));
      cur.clear();
    } else {
      cur += c;
    }
  }
  return out;
}

}  // namespace

KernelSpec parse_kernel_text(const std::string& text, const std::string& origin) {
  KernelSpec k;
  std::unordered_map<std::string, int32_t> array_ids;
  std::unordered_map<std::string, int32_t> pred_ids;
  enum class Section { Head, Predicates, Arrays, Body } section = Section::Head;

  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line == "[predicates]") { section = Section::Predicates; continue; }
    if (line == "[arrays]") { section = Section::Arrays; continue; }
    if (line == "[body]") { section = Section::Body; continue; }

    switch (section) {
      case Section::Head: {
        auto toks = split_ws(line);
        if (toks.size() != 2) parse_fail(origin, lineno, "expected '<key> <value>'");
        if (toks[0] == "kernel") k.name = toks[1];
        else if (toks[0] == "iterations") k.iteration_count = to_int(toks[1], origin, lineno);
        else if (toks[0] == "invocations") k.invocations = to_int(toks[1], origin, lineno);
        else parse_fail(origin, lineno, "unknown header key '" + toks[0] + "'");
        break;
      }
      case Section::Predicates: {
        auto toks = split_ws(line);
        if (toks.size() != 2) parse_fail(origin, lineno, "expected '<name> <probability>'");
        pred_ids[toks[0]] = static_cast<int32_t>(k.predicates.size());
        k.predicates.push_back({toks[0], std::stod(toks[1])});
        break;
      }
      case Section::Arrays: {
        // name type length [base=0x...] [ = seq | perm(m,a) | {v,...}]
        // The initializer separator is a spaced '=' so it cannot collide with
        // the base= attribute.
        std::string decl = line, init;
        size_t eq = line.find(" = ");
        if (eq != std::string::npos) {
          decl = trim(line.substr(0, eq));
          init = trim(line.substr(eq + 3));
        }
        auto toks = split_ws(decl);
        if (toks.size() < 3) parse_fail(origin, lineno, "expected '<name> <type> <length>'");
        ArrayDecl a;
        a.name = toks[0];
        a.elem_size = parse_elem_size(toks[1], origin, lineno);
        a.length = to_int(toks[2], origin, lineno);
        for (size_t t = 3; t < toks.size(); ++t) {
          if (toks[t].rfind("base=", 0) == 0)
            a.base = static_cast<uint64_t>(to_int(toks[t].substr(5), origin, lineno));
          else
            parse_fail(origin, lineno, "unknown array attribute '" + toks[t] + "'");
        }
        if (!init.empty()) {
          if (init == "seq") {
            a.contents.kind = ArrayContents::Kind::Sequential;
          } else if (init.rfind("perm(", 0) == 0 && init.back() == ')') {
            auto body = init.substr(5, init.size() - 6);
            size_t comma = body.find(',');
            if (comma == std::string::npos) parse_fail(origin, lineno, "perm needs two arguments");
            a.contents.kind = ArrayContents::Kind::AffinePerm;
            a.contents.mul = to_int(trim(body.substr(0, comma)), origin, lineno);
            a.contents.add = to_int(trim(body.substr(comma + 1)), origin, lineno);
          } else if (init.front() == '{' && init.back() == '}') {
            a.contents.kind = ArrayContents::Kind::Explicit;
            std::string cur;
            for (char c : init.substr(1, init.size() - 2) + ",") {
              if (c == ',') {
                if (!trim(cur).empty())
                  a.contents.values.push_back(to_int(trim(cur), origin, lineno));
                cur.clear();
              } else {
                cur += c;
              }
            }
          } else {
            parse_fail(origin, lineno, "unknown array initializer '" + init + "'");
          }
        }
        array_ids[a.name] = static_cast<int32_t>(k.arrays.size());
        k.arrays.push_back(std::move(a));
        break;
      }
      case Section::Body: {
        size_t colon = line.find(':');
        if (colon == std::string::npos) parse_fail(origin, lineno, "expected '<id>: <op> ...'");
        Instr ins;
        ins.id = static_cast<InstrId>(to_int(trim(line.substr(0, colon)), origin, lineno));
        auto toks = split_ws(trim(line.substr(colon + 1)));
        if (toks.empty()) parse_fail(origin, lineno, "missing opcode");
        const std::string& op = toks[0];
        size_t next = 1;
        if (op == "calc") ins.kind = InstrKind::AddrCalc;
        else if (op == "compute") ins.kind = InstrKind::Compute;
        else if (op == "load") ins.kind = InstrKind::Load;
        else if (op == "store") ins.kind = InstrKind::Store;
        else if (op == "prefetch") ins.kind = InstrKind::Prefetch;
        else parse_fail(origin, lineno, "unknown opcode '" + op + "'");
        if (ins.is_memory()) {
          if (toks.size() < 2) parse_fail(origin, lineno, "missing address operand");
          const std::string& ref = toks[1];
          size_t lb = ref.find('[');
          size_t rb = ref.rfind(']');
          if (lb == std::string::npos || rb == std::string::npos || rb < lb)
            parse_fail(origin, lineno, "bad address operand '" + ref + "'");
          std::string aname = ref.substr(0, lb);
          auto it = array_ids.find(aname);
          if (it == array_ids.end())
            fail(ErrCode::UnknownArray,
                 origin + ":" + std::to_string(lineno) + ": unknown array '" + aname + "'");
          ins.addr.array = it->second;
          parse_index_expr(ref.substr(lb + 1, rb - lb - 1), &ins.addr, origin, lineno);
          next = 2;
        }
        for (size_t t = next; t < toks.size(); ++t) {
          const std::string& a = toks[t];
          auto val = [&](const char* key) {
            return a.substr(std::string(key).size());
          };
          if (a.rfind("cost=", 0) == 0) ins.cost_ops = static_cast<int32_t>(to_int(val("cost="), origin, lineno));
          else if (a.rfind("in=", 0) == 0) ins.inputs = parse_id_list(val("in="), origin, lineno);
          else if (a.rfind("val=", 0) == 0) ins.inputs = parse_id_list(val("val="), origin, lineno);
          else if (a.rfind("calc=", 0) == 0) ins.addr.calc = static_cast<InstrId>(to_int(val("calc="), origin, lineno));
          else if (a.rfind("byte=", 0) == 0) ins.addr.byte_offset = static_cast<int32_t>(to_int(val("byte="), origin, lineno));
          else if (a.rfind("pred=", 0) == 0) {
            auto pit = pred_ids.find(val("pred="));
            if (pit == pred_ids.end()) parse_fail(origin, lineno, "unknown predicate '" + a + "'");
            ins.pred = pit->second;
          } else {
            parse_fail(origin, lineno, "unknown attribute '" + a + "'");
          }
        }
        k.body.push_back(std::move(ins));
        break;
      }
    }
  }
  if (k.name.empty()) fail(ErrCode::ParseError, origin + ": missing 'kernel <name>' header");
  return k;
}

KernelSpec load_kernel_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrCode::ConfigError, "cannot open kernel file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_kernel_text(ss.str(), path);
}

std::string kernel_to_text(const KernelSpec& k) {
  std::ostringstream out;
  out << "kernel " << k.name << "\n";
  out << "iterations " << k.iteration_count << "\n";
  if (k.invocations != 1) out << "invocations " << k.invocations << "\n";
  if (!k.predicates.empty()) {
    out << "\n[predicates]\n";
    for (const auto& p : k.predicates) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.6g", p.probability);
      out << p.name << " " << buf << "\n";
    }
  }
  out << "\n[arrays]\n";
  for (const auto& a : k.arrays) {
    out << a.name << " " << elem_size_name(a.elem_size) << " " << a.length;
    switch (a.contents.kind) {
      case ArrayContents::Kind::None: break;
      case ArrayContents::Kind::Sequential: out << " = seq"; break;
      case ArrayContents::Kind::AffinePerm:
        out << " = perm(" << a.contents.mul << "," << a.contents.add << ")";
        break;
      case ArrayContents::Kind::Explicit: {
        out << " = {";
        for (size_t v = 0; v < a.contents.values.size(); ++v)
          out << (v ? "," : "") << a.contents.values[v];
        out << "}";
        break;
      }
    }
    out << "\n";
  }
  out << "\n[body]\n";
  for (const Instr& ins : k.body) {
    out << ins.id << ": " << instr_kind_name(ins.kind);
    if (ins.is_memory())
      out << " " << k.arrays[static_cast<size_t>(ins.addr.array)].name << "["
          << index_expr_to_string(ins.addr) << "]";
    if (!ins.is_memory()) out << " cost=" << ins.cost_ops;
    if (!ins.inputs.empty()) {
      out << (ins.kind == InstrKind::Store ? " val=" : " in=");
      for (size_t t = 0; t < ins.inputs.size(); ++t) out << (t ? "," : "") << ins.inputs[t];
    }
    if (ins.addr.calc != kNoInstr) out << " calc=" << ins.addr.calc;
    if (ins.addr.byte_offset != 0) out << " byte=" << ins.addr.byte_offset;
    if (ins.pred >= 0) out << " pred=" << k.predicates[static_cast<size_t>(ins.pred)].name;
    out << "\n";
  }
  return out.str();
}

void save_kernel_file(const KernelSpec& kernel, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrCode::ConfigError, "cannot write kernel file '" + path + "'");
  out << kernel_to_text(kernel);
}

}  // namespace dae
