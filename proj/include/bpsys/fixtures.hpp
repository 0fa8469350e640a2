#pragma once

#include <string_view>

#include "bpsys/io.hpp"

namespace bpsys::fixtures {

// Two places on one marked circuit.
inline constexpr std::string_view circ2_text = R"(net ordinary "CIRC2"
place p1 tokens=1
place p2 tokens=0
trans t1
trans t2
arc p1 -> t1
arc t1 -> p2
arc p2 -> t2
arc t2 -> p1
)";

// XOR diamond: matched opening and closing XOR.
inline constexpr std::string_view xdia_text = R"(net bp "XDIA"
place p0 tokens=[high]
place p1 tokens=[]
place p2 tokens=[]
place p3 tokens=[]
trans x_open kind=xor
trans x_close kind=xor
trans tb kind=and
arc p0 -> x_open
arc x_open -> p1
arc x_open -> p2
arc p1 -> x_close
arc p2 -> x_close
arc x_close -> p3
arc p3 -> tb
arc tb -> p0
)";

// XOR opened, AND closed: the high token meets a low token at a_close.
inline constexpr std::string_view mismatch_text = R"(net bp "MISMATCH"
place p0 tokens=[high]
place p1 tokens=[]
place p2 tokens=[]
place p3 tokens=[]
trans x_open kind=xor
trans a_close kind=and
trans tb kind=and
arc p0 -> x_open
arc x_open -> p1
arc x_open -> p2
arc p1 -> a_close
arc p2 -> a_close
arc a_close -> p3
arc p3 -> tb
arc tb -> p0
)";

// Dead, although skeleton and high-system are safe and live. The high token
// on a can never reach the XOR loop around x2, so the high-system strands it.
inline constexpr std::string_view frozen_text = R"(net bp "FROZEN"
# high-system safe and live, with a frozen token
place a tokens=[high]
place b tokens=[low]
place c tokens=[]
place x1 tokens=[]
place x2 tokens=[high]
place y tokens=[]
place e tokens=[]
trans tA kind=and
trans tD kind=and
trans tX kind=xor
trans tO kind=xor
trans tE kind=and
arc a -> tA
arc b -> tA
arc tA -> c
arc c -> tD
arc tD -> x1
arc tD -> a
arc x1 -> tX
arc x2 -> tX
arc tX -> y
arc y -> tO
arc tO -> x2
arc tO -> e
arc e -> tE
arc tE -> b
)";

// XOR loop fed by a chain of ANDs that only ever carries low tokens.
inline constexpr std::string_view xloop_text = R"(net bp "XLOOP"
place x1 tokens=[]
place x2 tokens=[high]
place y tokens=[]
place e tokens=[low]
place f tokens=[]
trans tX kind=xor
trans tO kind=xor
trans tE kind=and
trans tF kind=and
arc x1 -> tX
arc x2 -> tX
arc tX -> y
arc y -> tO
arc tO -> x2
arc tO -> e
arc e -> tE
arc tE -> f
arc f -> tF
arc tF -> x1
)";

inline NetSystem circ2() { return parse_net(circ2_text); }
inline BPSystem xdia() { return parse_bp(xdia_text); }
inline BPSystem mismatch() { return parse_bp(mismatch_text); }
inline BPSystem frozen() { return parse_bp(frozen_text); }
inline BPSystem xloop() { return parse_bp(xloop_text); }

struct Entry {
  std::string_view name;
  std::string_view text;
};

inline constexpr Entry all[] = {
    {"CIRC2", circ2_text}, {"XDIA", xdia_text}, {"MISMATCH", mismatch_text}, {"FROZEN", frozen_text},
    {"XLOOP", xloop_text}};

}  // namespace bpsys::fixtures
