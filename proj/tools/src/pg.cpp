#include "memax_cli/pg.hpp"

#include <dlfcn.h>

#include <stdexcept>

namespace memax::cli {

namespace {

// Values from libpq-fe.h.
constexpr int kConnectionOk = 0;
constexpr int kCommandOk = 1;
constexpr int kTuplesOk = 2;

std::string trim_newline(std::string s) {
    while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.pop_back();
    return s;
}

}  // namespace

struct PgConnection::Api {
    void* handle = nullptr;
    void* (*connectdb)(const char*) = nullptr;
    int (*status)(const void*) = nullptr;
    char* (*error_message)(const void*) = nullptr;
    void (*finish)(void*) = nullptr;
    void* (*exec_params)(void*, const char*, int, const unsigned*, const char* const*, const int*, const int*,
                         int) = nullptr;
    int (*result_status)(const void*) = nullptr;
    char* (*result_error)(const void*) = nullptr;
    int (*ntuples)(const void*) = nullptr;
    int (*nfields)(const void*) = nullptr;
    char* (*fname)(const void*, int) = nullptr;
    char* (*getvalue)(const void*, int, int) = nullptr;
    int (*getisnull)(const void*, int, int) = nullptr;
    void (*clear)(void*) = nullptr;

    Api() {
        for (const char* name : {"libpq.so.5", "libpq.so", "libpq.dylib", "libpq.5.dylib"}) {
            handle = dlopen(name, RTLD_NOW | RTLD_LOCAL);
            if (handle) break;
        }
        if (!handle) throw std::runtime_error("cannot load libpq: " + std::string(dlerror()));
        load(connectdb, "PQconnectdb");
        load(status, "PQstatus");
        load(error_message, "PQerrorMessage");
        load(finish, "PQfinish");
        load(exec_params, "PQexecParams");
        load(result_status, "PQresultStatus");
        load(result_error, "PQresultErrorMessage");
        load(ntuples, "PQntuples");
        load(nfields, "PQnfields");
        load(fname, "PQfname");
        load(getvalue, "PQgetvalue");
        load(getisnull, "PQgetisnull");
        load(clear, "PQclear");
    }
    ~Api() {
        if (handle) dlclose(handle);
    }

    template <typename Fn>
    void load(Fn& fn, const char* symbol) {
        void* p = dlsym(handle, symbol);
        if (!p) throw std::runtime_error(std::string("libpq lacks ") + symbol);
        fn = reinterpret_cast<Fn>(p);
    }
};

PgConnection::PgConnection(const std::string& conninfo) : api_(std::make_unique<Api>()) {
    conn_ = api_->connectdb(conninfo.c_str());
    if (!conn_) throw std::runtime_error("connection failed: out of memory");
    if (api_->status(conn_) != kConnectionOk) {
        std::string msg = trim_newline(api_->error_message(conn_));
        api_->finish(conn_);
        conn_ = nullptr;
        throw std::runtime_error("connection failed: " + msg);
    }
}

PgConnection::~PgConnection() {
    if (conn_) api_->finish(conn_);
}

ResultSet PgConnection::exec(const std::string& sql, const std::vector<std::optional<std::string>>& params) {
    std::vector<const char*> values;
    values.reserve(params.size());
    for (const auto& p : params) values.push_back(p ? p->c_str() : nullptr);

    void* res = api_->exec_params(conn_, sql.c_str(), static_cast<int>(values.size()), nullptr, values.data(),
                                  nullptr, nullptr, 0);
    if (!res) throw std::runtime_error(trim_newline(api_->error_message(conn_)));
    std::unique_ptr<void, void (*)(void*)> guard(res, api_->clear);

    const int status = api_->result_status(res);
    if (status != kTuplesOk && status != kCommandOk) throw std::runtime_error(trim_newline(api_->result_error(res)));

    ResultSet out;
    const int cols = api_->nfields(res);
    for (int c = 0; c < cols; ++c) out.columns.emplace_back(api_->fname(res, c));
    const int rows = api_->ntuples(res);
    for (int r = 0; r < rows; ++r) {
        auto& row = out.rows.emplace_back();
        for (int c = 0; c < cols; ++c) {
            if (api_->getisnull(res, r, c)) {
                row.emplace_back(std::nullopt);
            } else {
                row.emplace_back(api_->getvalue(res, r, c));
            }
        }
    }
    return out;
}

}  // namespace memax::cli
