//===-- Parser.cpp - IR text parser ---------------------------------------===//
//
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
//
// Hand-written recursive descent over a small token stream. Whitespace and
// newlines are insignificant; '#' starts a comment that runs to end of line.
//
//===----------------------------------------------------------------------===//

#include "predicator/Parser.h"
#include "predicator/Error.h"

#include <cctype>
#include <charconv>
#include <set>

using namespace predicator;

namespace {

enum class Tok { Eof, Ident, Global, Local, Int, Punct };

struct Token {
  Tok Kind = Tok::Eof;
  std::string Text;
  std::int64_t Value = 0;
  std::size_t Line = 1, Column = 1;
};

class Lexer {
public:
  explicit Lexer(std::string_view Src) : Src(Src) {}

  std::vector<Token> run() {
    std::vector<Token> Out;
    while (true) {
      skipTrivia();
      Token T;
      T.Line = Line;
      T.Column = Col;
      if (Pos >= Src.size()) {
        Out.push_back(T);
        return Out;
      }
      char C = Src[Pos];
      if (C == '@' || C == '%') {
        advance();
        T.Kind = C == '@' ? Tok::Global : Tok::Local;
        T.Text = identifier();
        if (T.Text.empty())
          throw ParseError(std::string("expected name after '") + C + "'",
                           T.Line, T.Column);
      } else if (isIdentStart(C)) {
        T.Kind = Tok::Ident;
        T.Text = identifier();
      } else if (std::isdigit(static_cast<unsigned char>(C)) ||
                 (C == '-' && Pos + 1 < Src.size() &&
                  std::isdigit(static_cast<unsigned char>(Src[Pos + 1])))) {
        std::size_t Start = Pos;
        advance();
        while (Pos < Src.size() &&
               std::isdigit(static_cast<unsigned char>(Src[Pos])))
          advance();
        T.Kind = Tok::Int;
        T.Text = std::string(Src.substr(Start, Pos - Start));
        auto [Ptr, Ec] = std::from_chars(T.Text.data(),
                                         T.Text.data() + T.Text.size(), T.Value);
        if (Ec != std::errc())
          throw ParseError("integer literal out of range '" + T.Text + "'",
                           T.Line, T.Column);
      } else if (std::string_view("(){}[],:=").find(C) !=
                 std::string_view::npos) {
        T.Kind = Tok::Punct;
        T.Text = std::string(1, C);
        advance();
      } else {
        throw ParseError(std::string("unexpected character '") + C + "'",
                         Line, Col);
      }
      Out.push_back(std::move(T));
    }
  }

private:
  static bool isIdentStart(char C) {
    return std::isalpha(static_cast<unsigned char>(C)) || C == '_';
  }
  static bool isIdentChar(char C) {
    return std::isalnum(static_cast<unsigned char>(C)) || C == '_' || C == '.';
  }

  void advance() {
    if (Src[Pos] == '\n') {
      ++Line;
      Col = 1;
    } else {
      ++Col;
    }
    ++Pos;
  }

  void skipTrivia() {
    while (Pos < Src.size()) {
      char C = Src[Pos];
      if (C == '#') {
        while (Pos < Src.size() && Src[Pos] != '\n')
          advance();
      } else if (std::isspace(static_cast<unsigned char>(C))) {
        advance();
      } else {
        break;
      }
    }
  }

  std::string identifier() {
    std::size_t Start = Pos;
    while (Pos < Src.size() && isIdentChar(Src[Pos]))
      advance();
    return std::string(Src.substr(Start, Pos - Start));
  }

  std::string_view Src;
  std::size_t Pos = 0, Line = 1, Col = 1;
};

class Parser {
public:
  explicit Parser(std::vector<Token> Toks) : Toks(std::move(Toks)) {}

  Module parse() {
    Module M;
    std::set<std::string> FuncNames, MemNames;
    do {
      const Token &T = peek();
      if (isIdent(T, "mem")) {
        Token At = T;
        MemoryDecl D = parseMemory();
        if (!MemNames.insert(D.Name).second)
          throw error("duplicate memory '@" + D.Name + "'", At);
        M.Memories.push_back(std::move(D));
      } else if (isIdent(T, "func")) {
        Token At = T;
        Function F = parseFunction();
        if (!FuncNames.insert(F.Name).second)
          throw error("duplicate function '@" + F.Name + "'", At);
        M.Functions.push_back(std::move(F));
      } else {
        throw error("expected 'func' or 'mem'", T);
      }
    } while (peek().Kind != Tok::Eof);
    return M;
  }

private:
  static bool isIdent(const Token &T, std::string_view S) {
    return T.Kind == Tok::Ident && T.Text == S;
  }
  static bool isPunct(const Token &T, char C) {
    return T.Kind == Tok::Punct && T.Text[0] == C;
  }

  static ParseError error(const std::string &Msg, const Token &T) {
    return ParseError(Msg, T.Line, T.Column);
  }

  static std::string describe(const Token &T) {
    switch (T.Kind) {
    case Tok::Eof:
      return "end of input";
    case Tok::Global:
      return "'@" + T.Text + "'";
    case Tok::Local:
      return "'%" + T.Text + "'";
    default:
      return "'" + T.Text + "'";
    }
  }

  const Token &peek(std::size_t Ahead = 0) const {
    return Toks[std::min(Idx + Ahead, Toks.size() - 1)];
  }
  const Token &next() {
    const Token &T = peek();
    if (Idx < Toks.size() - 1)
      ++Idx;
    return T;
  }

  void expectPunct(char C) {
    const Token &T = peek();
    if (!isPunct(T, C))
      throw error(std::string("expected '") + C + "', found " + describe(T), T);
    next();
  }

  const Token &expect(Tok Kind, std::string_view What) {
    const Token &T = peek();
    if (T.Kind != Kind)
      throw error("expected " + std::string(What) + ", found " + describe(T),
                  T);
    return next();
  }

  MemoryDecl parseMemory() {
    next(); // 'mem'
    MemoryDecl D;
    D.Name = expect(Tok::Global, "memory name").Text;
    expectPunct('[');
    const Token &Len = expect(Tok::Int, "memory length");
    if (Len.Value < 0)
      throw error("memory length must be non-negative", Len);
    D.Length = static_cast<std::uint64_t>(Len.Value);
    expectPunct(']');
    return D;
  }

  Function parseFunction() {
    next(); // 'func'
    Function F;
    F.Name = expect(Tok::Global, "function name").Text;
    expectPunct('(');
    if (!isPunct(peek(), ')')) {
      F.Params.push_back(expect(Tok::Local, "parameter").Text);
      while (isPunct(peek(), ',')) {
        next();
        F.Params.push_back(expect(Tok::Local, "parameter").Text);
      }
    }
    expectPunct(')');
    expectPunct('{');
    std::set<std::string> Labels;
    do {
      const Token &LabelTok = peek();
      BasicBlock BB = parseBlock();
      if (!Labels.insert(BB.Label).second)
        throw error("duplicate label '" + BB.Label + "'", LabelTok);
      F.Blocks.push_back(std::move(BB));
    } while (!isPunct(peek(), '}'));
    next();
    return F;
  }

  Operand parseOperand() {
    const Token &T = peek();
    if (T.Kind == Tok::Local) {
      next();
      return Operand::value(T.Text);
    }
    if (T.Kind == Tok::Int) {
      next();
      return Operand::imm(T.Value);
    }
    throw error("expected operand, found " + describe(T), T);
  }

  std::string parseLabel() { return expect(Tok::Ident, "block label").Text; }

  BasicBlock parseBlock() {
    BasicBlock BB;
    BB.Label = parseLabel();
    expectPunct(':');
    while (true) {
      const Token &T = peek();
      if (isIdent(T, "br")) {
        next();
        Operand Cond = parseOperand();
        expectPunct(',');
        std::string TL = parseLabel();
        expectPunct(',');
        BB.Term = Terminator::br(std::move(Cond), std::move(TL), parseLabel());
        return BB;
      }
      if (isIdent(T, "jmp")) {
        next();
        BB.Term = Terminator::jmp(parseLabel());
        return BB;
      }
      if (isIdent(T, "ret")) {
        next();
        BB.Term = Terminator::ret(parseOperand());
        return BB;
      }
      if (isIdent(T, "store")) {
        next();
        Instruction I;
        I.Op = Opcode::Store;
        I.Memory = expect(Tok::Global, "memory name").Text;
        expectPunct(',');
        I.Operands.push_back(parseOperand());
        expectPunct(',');
        I.Operands.push_back(parseOperand());
        BB.Body.push_back(std::move(I));
        continue;
      }
      if (T.Kind == Tok::Local) {
        std::string Result = next().Text;
        expectPunct('=');
        const Token &OpTok = expect(Tok::Ident, "opcode");
        if (OpTok.Text == "phi") {
          if (!BB.Body.empty())
            throw error("phi must precede non-phi instructions", OpTok);
          BB.Phis.push_back(parsePhi(std::move(Result)));
          continue;
        }
        auto Op = parseBodyOpcode(OpTok.Text);
        if (!Op || *Op == Opcode::Store)
          throw error("unknown opcode '" + OpTok.Text + "'", OpTok);
        Instruction I;
        I.Result = std::move(Result);
        I.Op = *Op;
        if (*Op == Opcode::Load) {
          I.Memory = expect(Tok::Global, "memory name").Text;
          expectPunct(',');
          I.Operands.push_back(parseOperand());
        } else {
          for (unsigned N = 0, E = operandArity(*Op); N < E; ++N) {
            if (N)
              expectPunct(',');
            I.Operands.push_back(parseOperand());
          }
        }
        BB.Body.push_back(std::move(I));
        continue;
      }
      if (T.Kind == Tok::Ident && peek(1).Kind != Tok::Punct)
        throw error("unknown opcode '" + T.Text + "'", T);
      throw error("expected instruction or terminator in block '" + BB.Label +
                      "', found " + describe(T),
                  T);
    }
  }

  Phi parsePhi(std::string Result) {
    Phi P;
    P.Result = std::move(Result);
    do {
      if (!P.Incoming.empty())
        next(); // ','
      expectPunct('[');
      PhiIncoming In;
      In.Block = parseLabel();
      expectPunct(':');
      In.Value = parseOperand();
      expectPunct(']');
      P.Incoming.push_back(std::move(In));
    } while (isPunct(peek(), ',') && isPunct(peek(1), '['));
    return P;
  }

  std::vector<Token> Toks;
  std::size_t Idx = 0;
};

} // namespace

Module predicator::parseModule(std::string_view Text) {
  return Parser(Lexer(Text).run()).parse();
}
