import httpx
import pytest

from app.core.config import settings
from app.main import app, lifespan


@pytest.fixture
async def client():
    async with lifespan(app):
        transport = httpx.ASGITransport(app=app)
        async with httpx.AsyncClient(transport=transport, base_url="http://test") as ac:
            yield ac


@pytest.fixture(autouse=True)
def work_clock(monkeypatch):
    monkeypatch.setattr(settings, "clock", "work")
    monkeypatch.setattr(settings, "api_max_time_limit", 2.0)


async def test_health(client):
    response = await client.get("/api/v1/health")
    assert response.status_code == 200
    assert response.json() == {"status": "ok", "bounds": 205}


async def test_solve_ft06(client, data_dir):
    files = {"file": ("ft06.txt", (data_dir / "ft06.txt").read_bytes(), "text/plain")}
    response = await client.post("/api/v1/solve", files=files, data={"time_limit": "600", "seed": "1"})

    assert response.status_code == 200
    body = response.json()
    assert body["instance"] == "ft06"
    assert body["feasible"] is True
    assert body["makespan"] >= 55
    assert len(body["machines"]) == 6
    assert sorted(op for ops in body["machines"] for op in ops) == list(range(36))
    assert body["time_to_best"] <= 2.0


async def test_solve_rejects_garbage(client):
    files = {"file": ("bad.txt", b"2 2\n0 1 1\n", "text/plain")}
    response = await client.post("/api/v1/solve", files=files)
    assert response.status_code == 422
    assert "line" in response.json()["detail"]


async def test_solve_rejects_unknown_format(client, data_dir):
    files = {"file": ("ft06.txt", (data_dir / "ft06.txt").read_bytes(), "text/plain")}
    response = await client.post("/api/v1/solve", files=files, data={"format": "xml"})
    assert response.status_code == 422


async def test_check(client, data_dir):
    instance = ("toy.txt", (data_dir / "toy_std.txt").read_bytes(), "text/plain")

    ok = await client.post("/api/v1/check", files={"file": instance, "solution": ("s.txt", b"0 3\n2 1\n")})
    assert ok.json() == {"feasible": True, "makespan": 8}

    cyclic = await client.post("/api/v1/check", files={"file": instance, "solution": ("s.txt", b"3 0\n1 2\n")})
    assert cyclic.json() == {"feasible": False, "makespan": None}

    broken = await client.post("/api/v1/check", files={"file": instance, "solution": ("s.txt", b"0 1\n2 3\n")})
    assert broken.status_code == 422
