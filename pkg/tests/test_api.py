"""
Tests for the Flask JSON surface
"""
import pytest

from photon_gbd import commands


class TestHealthAndErrors:

    def test_health_check(self, client):
        response = client.get('/')
        assert response.status_code == 200
        data = response.get_json()
        assert data['status'] == 'healthy'
        assert data['schema_version'] == '1.0'

    def test_body_must_be_json_object(self, client):
        response = client.post('/api/pmf', data='not json', content_type='text/plain')
        assert response.status_code == 400
        assert response.get_json()['error'] == 'Validation Error'

    def test_missing_required_fields(self, client):
        response = client.post('/api/gbd', json={'model': 'be', 'A': 1.0})
        assert response.status_code == 400
        message = response.get_json()['message']
        assert 'B' in message and 'n' in message

    def test_non_numeric_field(self, client):
        response = client.post('/api/pmf', json={'model': 'be', 'volume': 'big', 'w': 1.0})
        assert response.status_code == 400


class TestDistributionRoutes:

    def test_pmf(self, client):
        response = client.post('/api/pmf', json={'model': 'be', 'volume': 1.0, 'w': 1.0,
                                                  'k_max': 3})
        assert response.status_code == 200
        data = response.get_json()
        assert [row['p_k'] for row in data['rows']] == pytest.approx([0.5, 0.25, 0.125, 0.0625])
        assert data['tail_bound'] == pytest.approx(0.0625)

    def test_pmf_unknown_model(self, client):
        response = client.post('/api/pmf', json={'model': 'thermal', 'volume': 1.0})
        assert response.status_code == 400

    def test_gbd_be_row(self, client):
        response = client.post('/api/gbd', json={'model': 'be', 'A': 0.5, 'B': 0.5, 'n': 2,
                                                  'w': 1.0})
        assert response.status_code == 200
        data = response.get_json()
        assert [row['W'] for row in data['rows']] == pytest.approx([0.375, 0.25, 0.375])
        assert data['split'] == {'alpha': 0.5, 'beta': 0.5}

    def test_gbd_k_range(self, client):
        response = client.post('/api/gbd', json={'model': 'poisson', 'A': 1.0, 'B': 1.0,
                                                  'n': -1, 'w': 1.0})
        assert response.status_code == 400

    @pytest.mark.parametrize('n', [2.5, [2], 'two'])
    def test_gbd_rejects_non_integer_count(self, client, n):
        response = client.post('/api/gbd', json={'model': 'be', 'A': 0.5, 'B': 0.5, 'n': n,
                                                  'w': 1.0})
        assert response.status_code == 400
        assert 'n must be a nonnegative integer' in response.get_json()['message']

    def test_gbd_accepts_integer_string(self, client):
        response = client.post('/api/gbd', json={'model': 'be', 'A': 0.5, 'B': 0.5, 'n': '2',
                                                  'w': 1.0})
        assert response.status_code == 200
        assert len(response.get_json()['rows']) == 3

    def test_pmf_rejects_fractional_k_max(self, client):
        response = client.post('/api/pmf', json={'model': 'be', 'volume': 1.0, 'w': 1.0,
                                                  'k_max': 3.7})
        assert response.status_code == 400


class TestFigureRoutes:

    def test_fig2_grid(self, client):
        response = client.get('/api/figures/fig2?points=5')
        assert response.status_code == 200
        data = response.get_json()
        assert data['columns'] == ['S', 'W20', 'W11', 'W02']
        assert len(data['rows']) == 5
        assert data['passed'] is True

    def test_fig4_volumes_from_query(self, client):
        response = client.get('/api/figures/fig4?n=10&s_values=1,1000')
        assert response.status_code == 200
        assert response.get_json()['columns'] == ['k', 'S=1', 'S=1000', 'binomial']

    @pytest.mark.parametrize('query', ['points=2.5', 'points=five', 'points=-3'])
    def test_fractional_point_count_rejected(self, client, query):
        response = client.get(f'/api/figures/fig2?{query}')
        assert response.status_code == 400

    def test_unknown_figure(self, client):
        response = client.get('/api/figures/fig9')
        assert response.status_code == 400


class TestVerifyRoute:

    def test_single_suite(self, client):
        response = client.post('/api/verify', json={'suite': 'vandermonde'})
        assert response.status_code == 200
        data = response.get_json()
        assert data['passed'] is True
        assert data['suites'][0]['suite'] == 'vandermonde'

    def test_unknown_suite(self, client):
        response = client.post('/api/verify', json={'suite': 'bogus'})
        assert response.status_code == 400


class TestSampleRoute:

    def test_polya_sample(self, client):
        response = client.post('/api/sample', json={'target': 'polya', 'n': 2, 'alpha': 0.5,
                                                     'S': 1.0, 'M': 50000, 'seed': 42})
        assert response.status_code == 200
        data = response.get_json()
        assert data['passed'] is True
        assert data['checks']['draws'] == 50000
        assert data['rng']['seed'] == 42

    def test_too_few_draws(self, client):
        response = client.post('/api/sample', json={'target': 'poisson', 'mean': 1.0, 'M': 10})
        assert response.status_code == 400

    def test_budget_exhaustion(self, client, monkeypatch):
        monkeypatch.setattr(commands.config, 'MC_DRAW_BUDGET', 10000)
        response = client.post('/api/sample', json={
            'target': 'gbd', 'model': 'poisson', 'A': 0.5, 'B': 0.5, 'w': 1.0, 'n': 30,
            'M': 1000, 'seed': 1})
        assert response.status_code == 503
        data = response.get_json()
        assert data['error'] == 'Sampling Budget Exhausted'
        assert data['accepted'] < data['attempts']


class TestScenarioRoute:

    def test_beamsplitter_tables(self, client):
        response = client.post('/api/scenario', json={
            'device': 'beamsplitter', 'alpha': 0.5, 'model': 'be', 'w': 1.0, 'S': 2.0})
        assert response.status_code == 200
        data = response.get_json()
        assert data['passed'] is True
        assert data['transmitted'][0] == {'k': 0, 'probability': pytest.approx(0.5)}
        assert data['joint'][0]['m'] == 0
        assert data['parameters']['alpha'] == 0.5

    def test_devices_agree(self, client):
        bodies = []
        for device in ('detector', 'diaphragm'):
            response = client.post('/api/scenario', json={
                'device': device, 'alpha': 0.3, 'model': 'poisson', 'w': 2.0, 'S': 1.0})
            bodies.append(response.get_json())
        assert bodies[0] == bodies[1]

    def test_unknown_device(self, client):
        response = client.post('/api/scenario', json={
            'device': 'prism', 'alpha': 0.5, 'model': 'be', 'w': 1.0, 'S': 2.0})
        assert response.status_code == 400
