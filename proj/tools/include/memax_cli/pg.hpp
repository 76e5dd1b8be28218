#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace memax::cli {

struct ResultSet {
    std::vector<std::string> columns;
    std::vector<std::vector<std::optional<std::string>>> rows;
};

/// libpq loaded at run time; the library has no build-time dependency on it.
/// Every method throws std::runtime_error with the server message.
class PgConnection {
public:
    explicit PgConnection(const std::string& conninfo);
    ~PgConnection();
    PgConnection(const PgConnection&) = delete;
    PgConnection& operator=(const PgConnection&) = delete;

    /// PQexecParams with text-format parameters; nullopt binds NULL.
    ResultSet exec(const std::string& sql, const std::vector<std::optional<std::string>>& params);

private:
    struct Api;
    std::unique_ptr<Api> api_;
    void* conn_ = nullptr;
};

}  // namespace memax::cli
