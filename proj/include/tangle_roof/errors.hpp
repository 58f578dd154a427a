#pragma once

#include <stdexcept>
#include <string>

namespace tangle_roof {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DuplicateTerm : public Error { public: using Error::Error; };
class ShapeError : public Error { public: using Error::Error; };
class ParseError : public Error { public: using Error::Error; };
class IndexError : public Error { public: using Error::Error; };
class RankError : public Error { public: using Error::Error; };
class CollisionError : public Error { public: using Error::Error; };
class IncompleteInput : public Error { public: using Error::Error; };
class UnknownState : public Error { public: using Error::Error; };
class ParamError : public Error { public: using Error::Error; };
class DegenerateChord : public Error { public: using Error::Error; };

} // namespace tangle_roof
